#ifndef MMHM_ISOSCORE_HPP
#define MMHM_ISOSCORE_HPP

#include "mmhm/complex.hpp"

#include <span>
#include <vector>

namespace mmhm {

struct SpectrumSummary {
    std::vector<double> eigenvalues; // descending, clamped at 0
    std::vector<double> normalized;  // eigenvalues / their sum (empty when the sum is 0)
    double isoscore = 0.0;
    bool degenerate = false; // zero covariance: every eigenvalue tied at 0
};

/// IsoScore from the variances along the principal axes (the diagonal of
/// the PCA-reoriented covariance). Throws ConfigError when fewer than two
/// dimensions are given.
double isoscore_from_variances(std::span<const double> variances);

/// Spectrum and IsoScore of a symmetric d x d covariance matrix (row-major).
SpectrumSummary isoscore_from_covariance(std::span<const double> covariance, std::size_t d);

/// Spectrum and IsoScore of the snapshot's points, in float64. Needs at
/// least two rows and two columns.
SpectrumSummary spectrum(const EmbeddingSnapshot& snapshot);

inline double isoscore(const EmbeddingSnapshot& snapshot) { return spectrum(snapshot).isoscore; }

} // namespace mmhm

#endif // MMHM_ISOSCORE_HPP
