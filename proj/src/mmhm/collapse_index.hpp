#ifndef MMHM_COLLAPSE_INDEX_HPP
#define MMHM_COLLAPSE_INDEX_HPP

#include "mmhm/signals.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmhm {

/// Feature order of the collapse index.
enum class Component : std::size_t { Betti0 = 0, Betti1, Betti2, Churn, Fragility, Footprint };

inline constexpr std::size_t kComponentCount = 6;

using FeatureVector = std::array<double, kComponentCount>;

std::string_view component_name(Component c);

struct CiWeights {
    FeatureVector w{0.05, 0.05, 0.05, 0.3, 0.4, 0.15};

    double operator[](Component c) const { return w[static_cast<std::size_t>(c)]; }
    double sum() const;
    /// Throws ConfigError unless all weights are non-negative and sum to 1 within 1e-9.
    void validate() const;
};

/// Zero the dropped weights and rescale the rest by 1 / (1 - dropped mass).
/// Throws ConfigError when nothing would remain.
CiWeights ablate(const CiWeights& weights, std::span<const Component> drop);
CiWeights ablate(const CiWeights& weights, Component drop);

enum class ZScoreMode { Causal, Retrospective };

std::string_view zscore_mode_name(ZScoreMode mode);
ZScoreMode parse_zscore_mode(std::string_view name);

/// Welford accumulator with population variance.
class RunningStats {
public:
    void push(double x);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ == 0 ? 0.0 : m2_ / static_cast<double>(n_); }
    double stddev() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

inline constexpr double kStdFloor = 1e-8;
inline constexpr std::size_t kCausalWarmup = 2;

/// (value - mean) / max(std, 1e-8). In causal mode the first kCausalWarmup
/// observations score 0.
double zscore(double value, const RunningStats& stats, ZScoreMode mode);

/// (d_beta0, d_beta1, d_beta2, churn, -R, B): phi(R) = -R is applied here,
/// before standardization.
FeatureVector raw_features(const EpochSignals& s);

/// Weighted sum of z-scored features.
double ci_raw(const FeatureVector& z, const CiWeights& weights);

/// alpha * prev + (1 - alpha) * ci.
double ema_step(double prev, double ci, double alpha);
std::vector<double> ema(std::span<const double> series, double alpha);

struct CiPoint {
    FeatureVector z{};
    double raw = 0.0;
    double smoothed = 0.0;
};

/// Live collapse index: each push uses only the epochs seen so far.
class CausalCi {
public:
    CausalCi(CiWeights weights, double alpha);

    /// The first `baseline` pushes (the full-build epoch) score 0 and are not
    /// added to the running statistics.
    CiPoint push(const FeatureVector& features, bool baseline = false);

private:
    CiWeights weights_;
    double alpha_;
    std::array<RunningStats, kComponentCount> stats_;
    bool started_ = false;
    double prev_ = 0.0;
};

struct CiSeries {
    std::vector<FeatureVector> z;
    std::vector<double> raw;
    std::vector<double> smoothed;
};

/// Collapse index over a whole run. The first `baseline` epochs score 0 and
/// are excluded from the standardization statistics.
CiSeries compute_ci_series(std::span<const FeatureVector> features, const CiWeights& weights, double alpha,
                           ZScoreMode mode, std::size_t baseline = 1);

} // namespace mmhm

#endif // MMHM_COLLAPSE_INDEX_HPP
