#include "mmhm/collapse_index.hpp"

#include "mmhm/error.hpp"

#include <algorithm>
#include <cmath>

namespace mmhm {

std::string_view component_name(Component c)
{
    switch (c) {
    case Component::Betti0:
        return "betti0";
    case Component::Betti1:
        return "betti1";
    case Component::Betti2:
        return "betti2";
    case Component::Churn:
        return "churn";
    case Component::Fragility:
        return "fragility";
    case Component::Footprint:
        return "footprint";
    }
    return "?";
}

double CiWeights::sum() const
{
    double s = 0.0;
    for (double x : w)
        s += x;
    return s;
}

void CiWeights::validate() const
{
    for (double x : w)
        if (!(x >= 0.0) || !std::isfinite(x))
            throw ConfigError("collapse index weights must be finite and non-negative");
    if (std::abs(sum() - 1.0) > 1e-9)
        throw ConfigError("collapse index weights must sum to 1");
}

CiWeights ablate(const CiWeights& weights, std::span<const Component> drop)
{
    CiWeights out = weights;
    double dropped = 0.0;
    for (Component c : drop) {
        const auto i = static_cast<std::size_t>(c);
        dropped += out.w[i];
        out.w[i] = 0.0;
    }
    const double rest = 1.0 - dropped;
    if (!(rest > 1e-12))
        throw ConfigError("ablation would drop every component");
    if (dropped == 0.0)
        return out;
    for (double& x : out.w)
        x /= rest;
    return out;
}

CiWeights ablate(const CiWeights& weights, Component drop)
{
    return ablate(weights, std::span<const Component>(&drop, 1));
}

std::string_view zscore_mode_name(ZScoreMode mode)
{
    return mode == ZScoreMode::Causal ? "causal" : "retro";
}

ZScoreMode parse_zscore_mode(std::string_view name)
{
    if (name == "causal")
        return ZScoreMode::Causal;
    if (name == "retro" || name == "retrospective")
        return ZScoreMode::Retrospective;
    throw ConfigError("unknown z-score mode '" + std::string(name) + "'");
}

void RunningStats::push(double x)
{
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

double RunningStats::stddev() const
{
    return std::sqrt(std::max(0.0, variance()));
}

double zscore(double value, const RunningStats& stats, ZScoreMode mode)
{
    if (mode == ZScoreMode::Causal && stats.count() <= kCausalWarmup)
        return 0.0;
    return (value - stats.mean()) / std::max(stats.stddev(), kStdFloor);
}

FeatureVector raw_features(const EpochSignals& s)
{
    return {static_cast<double>(s.delta_betti[0]),
            static_cast<double>(s.delta_betti[1]),
            static_cast<double>(s.delta_betti[2]),
            s.churn,
            -static_cast<double>(s.fragility),
            s.footprint};
}

double ci_raw(const FeatureVector& z, const CiWeights& weights)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < kComponentCount; ++i)
        acc += weights.w[i] * z[i];
    return acc;
}

double ema_step(double prev, double ci, double alpha)
{
    return alpha * prev + (1.0 - alpha) * ci;
}

std::vector<double> ema(std::span<const double> series, double alpha)
{
    std::vector<double> out;
    out.reserve(series.size());
    for (std::size_t t = 0; t < series.size(); ++t)
        out.push_back(t == 0 ? series[0] : ema_step(out.back(), series[t], alpha));
    return out;
}

CausalCi::CausalCi(CiWeights weights, double alpha) : weights_(weights), alpha_(alpha)
{
    weights_.validate();
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw ConfigError("smoothing factor alpha must lie in [0, 1)");
}

CiPoint CausalCi::push(const FeatureVector& features, bool baseline)
{
    CiPoint p;
    if (!baseline) {
        for (std::size_t i = 0; i < kComponentCount; ++i) {
            stats_[i].push(features[i]);
            p.z[i] = zscore(features[i], stats_[i], ZScoreMode::Causal);
        }
        p.raw = ci_raw(p.z, weights_);
    }
    p.smoothed = started_ ? ema_step(prev_, p.raw, alpha_) : p.raw;
    started_ = true;
    prev_ = p.smoothed;
    return p;
}

CiSeries compute_ci_series(std::span<const FeatureVector> features, const CiWeights& weights, double alpha,
                           ZScoreMode mode, std::size_t baseline)
{
    CiSeries out;
    if (mode == ZScoreMode::Causal) {
        CausalCi ci(weights, alpha);
        for (std::size_t t = 0; t < features.size(); ++t) {
            const CiPoint p = ci.push(features[t], t < baseline);
            out.z.push_back(p.z);
            out.raw.push_back(p.raw);
        }
    } else {
        weights.validate();
        std::array<RunningStats, kComponentCount> stats;
        for (std::size_t t = baseline; t < features.size(); ++t)
            for (std::size_t i = 0; i < kComponentCount; ++i)
                stats[i].push(features[t][i]);
        for (std::size_t t = 0; t < features.size(); ++t) {
            FeatureVector z{};
            double raw = 0.0;
            if (t >= baseline) {
                for (std::size_t i = 0; i < kComponentCount; ++i)
                    z[i] = zscore(features[t][i], stats[i], mode);
                raw = ci_raw(z, weights);
            }
            out.z.push_back(z);
            out.raw.push_back(raw);
        }
    }
    // Both modes smooth the same way; the causal path above recomputes it
    // inside CausalCi, which must agree bit for bit with ema().
    out.smoothed = ema(out.raw, alpha);
    return out;
}

} // namespace mmhm
