#include "mmhm/synth.hpp"

#include "mmhm/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace mmhm {

std::string_view trajectory_kind_name(TrajectoryKind kind)
{
    switch (kind) {
    case TrajectoryKind::Jitter:
        return "jitter";
    case TrajectoryKind::DimensionalCollapse:
        return "dimensional_collapse";
    case TrajectoryKind::CompleteCollapse:
        return "complete_collapse";
    case TrajectoryKind::Fragmentation:
        return "fragmentation";
    }
    return "?";
}

TrajectoryKind parse_trajectory_kind(std::string_view name)
{
    for (auto k : {TrajectoryKind::Jitter, TrajectoryKind::DimensionalCollapse, TrajectoryKind::CompleteCollapse,
                   TrajectoryKind::Fragmentation})
        if (trajectory_kind_name(k) == name)
            return k;
    throw ConfigError("unknown trajectory kind '" + std::string(name) + "'");
}

void TrajectorySpec::validate() const
{
    if (n < 2)
        throw ConfigError("trajectory needs at least 2 points");
    if (d < 1)
        throw ConfigError("trajectory needs at least 1 dimension");
    if (epochs < 1)
        throw ConfigError("trajectory needs at least 1 epoch");
    if (kind != TrajectoryKind::Jitter && onset >= epochs)
        throw ConfigError("onset must lie before the last epoch");
    if (!(severity >= 0.0 && severity <= 1.0))
        throw ConfigError("severity must lie in [0, 1]");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw ConfigError("noise scale must be finite and non-negative");
}

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double f32(double x)
{
    return static_cast<double>(static_cast<float>(x));
}

Matrix gaussian(std::mt19937_64& rng, std::size_t n, std::size_t d)
{
    std::normal_distribution<double> g;
    Matrix m(n, d);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = g(rng);
    return m;
}

EmbeddingSnapshot to_snapshot(std::uint32_t epoch, const Matrix& m)
{
    std::vector<double> v(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            v[static_cast<std::size_t>(i * m.cols() + j)] = f32(m(i, j));
    return {epoch, static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()), std::move(v)};
}

// Epochs of contraction applied at epoch t.
double steps_after(const TrajectorySpec& spec, std::uint32_t t)
{
    return t > spec.onset ? static_cast<double>(t - spec.onset) : 0.0;
}

} // namespace

std::vector<double> task_metric(const TrajectorySpec& spec)
{
    std::seed_seq seq{spec.seed, std::uint64_t{0x6d657472}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(-kMetricNoise, kMetricNoise);
    std::vector<double> out(spec.epochs);
    const std::uint32_t drop = spec.onset + spec.metric_lag;
    for (std::uint32_t t = 0; t < spec.epochs; ++t) {
        double m = 1.0;
        if (spec.kind != TrajectoryKind::Jitter && t >= drop)
            m = std::max(0.0, 1.0 - spec.severity * static_cast<double>(t - drop + 1));
        out[t] = m + u(rng);
    }
    return out;
}

Trajectory gen_trajectory(const TrajectorySpec& spec)
{
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto d = static_cast<Eigen::Index>(spec.d);

    const Matrix base = gaussian(rng, spec.n, spec.d);
    const Eigen::RowVectorXd mean = base.colwise().mean();

    // Dimensional collapse keeps the leading principal directions of the base.
    Matrix keep_proj;
    if (spec.kind == TrajectoryKind::DimensionalCollapse) {
        const Matrix centered = base.rowwise() - mean;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centered.transpose() * centered);
        const auto kept = static_cast<Eigen::Index>((spec.d + 9) / 10);
        const Eigen::MatrixXd top = solver.eigenvectors().rightCols(kept);
        keep_proj = top * top.transpose();
    }

    // Fragmentation: four groups by nearest seed point, pushed apart along
    // the seed's direction from the mean.
    std::vector<int> group;
    Matrix shift;
    if (spec.kind == TrajectoryKind::Fragmentation) {
        const Eigen::Index groups = std::min<Eigen::Index>(4, n);
        std::vector<Eigen::Index> ids(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i)
            ids[static_cast<std::size_t>(i)] = i;
        std::shuffle(ids.begin(), ids.end(), rng);
        shift.resize(groups, d);
        for (Eigen::Index g = 0; g < groups; ++g) {
            Eigen::RowVectorXd dir = base.row(ids[static_cast<std::size_t>(g)]) - mean;
            const double len = dir.norm();
            shift.row(g) = len > 0.0 ? Eigen::RowVectorXd(dir / len) : Eigen::RowVectorXd::Zero(d);
        }
        group.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            double best_d = INFINITY;
            for (Eigen::Index g = 0; g < groups; ++g) {
                const double dist = (base.row(i) - base.row(ids[static_cast<std::size_t>(g)])).squaredNorm();
                if (dist < best_d) {
                    best_d = dist;
                    best = g;
                }
            }
            group[static_cast<std::size_t>(i)] = static_cast<int>(best);
        }
    }

    Trajectory out;
    out.snapshots.reserve(spec.epochs);
    const double scale = spec.kind == TrajectoryKind::Jitter ? spec.noise * spec.severity : spec.noise;
    for (std::uint32_t t = 0; t < spec.epochs; ++t) {
        Matrix y = base;
        if (scale > 0.0)
            y += scale * gaussian(rng, spec.n, spec.d);
        else
            (void)gaussian(rng, spec.n, spec.d); // keep the stream aligned across severities
        const double steps = steps_after(spec, t);
        switch (spec.kind) {
        case TrajectoryKind::Jitter:
            break;
        case TrajectoryKind::DimensionalCollapse: {
            const double f = std::pow(1.0 - spec.severity, steps);
            const Matrix c = y.rowwise() - mean;
            const Matrix kept = c * keep_proj;
            y = (kept + f * (c - kept)).rowwise() + mean;
            break;
        }
        case TrajectoryKind::CompleteCollapse: {
            const double f = std::pow(1.0 - spec.severity, steps);
            y = (f * (y.rowwise() - mean)).rowwise() + mean;
            break;
        }
        case TrajectoryKind::Fragmentation: {
            const double dist = spec.severity * steps;
            for (Eigen::Index i = 0; i < n; ++i)
                y.row(i) += dist * shift.row(group[static_cast<std::size_t>(i)]);
            break;
        }
        }
        out.snapshots.push_back(to_snapshot(t, y));
    }
    out.task_metric = task_metric(spec);
    return out;
}

} // namespace mmhm
