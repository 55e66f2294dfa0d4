#ifndef MMHM_ANALYSIS_HPP
#define MMHM_ANALYSIS_HPP

#include "mmhm/collapse_index.hpp"

#include <span>
#include <string>
#include <vector>

namespace mmhm {

/// Pearson correlation; 0 when either series has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties get the average rank.
std::vector<double> average_ranks(std::span<const double> x);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

struct LagEntry {
    int lag = 0;       // l <= 0: CI(t) against metric(t + |l|)
    std::size_t n = 0; // overlapping pairs
    double pearson = 0.0;
    double spearman = 0.0;
};

/// Higher-is-better metrics signal early warning through negative rho at
/// negative lags. Lags are ranked by |Pearson|; ties go to the smaller |l|.
struct LagReport {
    std::vector<LagEntry> lags; // l = -L .. 0
    int best_lag = 0;           // over all lags
    int best_negative_lag = 0;  // over l < 0
    double rho_negative = 0.0;  // Pearson at best_negative_lag
    double rho_zero = 0.0;
    int lead = 0;               // -best_lag
    bool negative_beats_zero = false;
};

/// Throws AnalysisError unless both series have the same length >= L + 3.
LagReport lagged_correlation(std::span<const double> ci, std::span<const double> metric, int max_lag);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    std::size_t n = 0;
    bool degenerate = false; // zero-variance regressor or response
};

/// Ordinary least squares with intercept. Throws AnalysisError below 3 points.
ScalingFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fit of aggregate footprint B(t) against |S(t)| / N over epochs >= 1.
ScalingFit scaling_fit(std::span<const EpochSignals> run);

/// A named set of components dropped together.
struct ComponentGroup {
    std::string name;
    std::vector<Component> components;
};

/// Betti deltas as one group, then churn, fragility and footprint.
std::vector<ComponentGroup> default_ablation_groups();

struct AblationEntry {
    std::string name;
    double rho_negative = 0.0; // best negative-lag Pearson of the ablated CI
    int best_negative_lag = 0;
    double delta = 0.0; // ablated minus full
};

struct AblationReport {
    double full_rho_negative = 0.0;
    int full_best_negative_lag = 0;
    std::vector<AblationEntry> entries;
};

/// Recomputes the smoothed CI with each group dropped and compares best
/// negative-lag correlations against the full-weight CI.
AblationReport ablation_deltas(std::span<const FeatureVector> features, std::span<const double> metric,
                               const CiWeights& weights, double alpha, ZScoreMode mode, int max_lag,
                               std::span<const ComponentGroup> groups);

} // namespace mmhm

#endif // MMHM_ANALYSIS_HPP
