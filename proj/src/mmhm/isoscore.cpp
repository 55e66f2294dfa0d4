#include "mmhm/isoscore.hpp"

#include "mmhm/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace mmhm {

double isoscore_from_variances(std::span<const double> variances)
{
    const std::size_t n = variances.size();
    if (n < 2)
        throw ConfigError("IsoScore needs at least two dimensions");
    const double d = static_cast<double>(n);
    double norm2 = 0.0;
    for (double v : variances)
        norm2 += v * v;
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0))
        return 1.0;

    const double sqrt_d = std::sqrt(d);
    double defect2 = 0.0;
    for (double v : variances) {
        const double diff = sqrt_d * v / norm - 1.0;
        defect2 += diff * diff;
    }
    const double delta2 = defect2 / (2.0 * (d - sqrt_d));
    const double a = d - delta2 * (d - sqrt_d);
    const double phi = a * a / (d * d);
    const double score = (d * phi - 1.0) / (d - 1.0);
    return std::clamp(score, 0.0, 1.0);
}

namespace {

SpectrumSummary summarize(const Eigen::MatrixXd& cov)
{
    const auto d = static_cast<std::size_t>(cov.rows());
    if (d < 2)
        throw ConfigError("IsoScore needs at least two dimensions");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw AnalysisError("covariance eigen-decomposition failed");

    SpectrumSummary s;
    s.eigenvalues.resize(d);
    for (std::size_t i = 0; i < d; ++i)
        s.eigenvalues[i] = std::max(0.0, solver.eigenvalues()[static_cast<Eigen::Index>(d - 1 - i)]);

    double total = 0.0;
    for (double v : s.eigenvalues)
        total += v;
    if (total > 0.0) {
        for (double v : s.eigenvalues)
            s.normalized.push_back(v / total);
    } else {
        s.degenerate = true;
    }
    s.isoscore = isoscore_from_variances(s.eigenvalues);
    return s;
}

} // namespace

SpectrumSummary isoscore_from_covariance(std::span<const double> covariance, std::size_t d)
{
    if (covariance.size() != d * d)
        throw DataError("covariance must be d x d");
    Eigen::MatrixXd cov(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = covariance[i * d + j];
    return summarize(cov);
}

SpectrumSummary spectrum(const EmbeddingSnapshot& snapshot)
{
    if (snapshot.rows < 2)
        throw DataError("IsoScore needs at least two points");
    const auto n = static_cast<Eigen::Index>(snapshot.rows);
    const auto d = static_cast<Eigen::Index>(snapshot.cols);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
        snapshot.values.data(), n, d);
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd cov = (centered.adjoint() * centered) / static_cast<double>(n - 1);
    return summarize(cov);
}

} // namespace mmhm
