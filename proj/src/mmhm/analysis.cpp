#include "mmhm/analysis.hpp"

#include "mmhm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmhm {

double pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw AnalysisError("correlated series differ in length");
    const std::size_t n = x.size();
    if (n < 2)
        return 0.0;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x)
{
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i + 1;
        while (j < idx.size() && x[idx[j]] == x[idx[i]])
            ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t m = i; m < j; ++m)
            ranks[idx[m]] = r;
        i = j;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y)
{
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

namespace {

bool better(double rho, int lag, double best_rho, int best_lag)
{
    const double a = std::abs(rho);
    const double b = std::abs(best_rho);
    if (a != b)
        return a > b;
    return std::abs(lag) < std::abs(best_lag);
}

} // namespace

LagReport lagged_correlation(std::span<const double> ci, std::span<const double> metric, int max_lag)
{
    if (max_lag < 1)
        throw AnalysisError("maximum lag must be at least 1");
    if (ci.size() != metric.size())
        throw AnalysisError("CI and metric series differ in length");
    if (ci.size() < static_cast<std::size_t>(max_lag) + 3)
        throw AnalysisError("series of length " + std::to_string(ci.size()) + " too short for lag " +
                            std::to_string(max_lag));

    LagReport r;
    bool have_best = false;
    bool have_neg = false;
    for (int lag = -max_lag; lag <= 0; ++lag) {
        const auto shift = static_cast<std::size_t>(-lag);
        const std::size_t n = ci.size() - shift;
        LagEntry e;
        e.lag = lag;
        e.n = n;
        e.pearson = pearson(ci.subspan(0, n), metric.subspan(shift, n));
        e.spearman = spearman(ci.subspan(0, n), metric.subspan(shift, n));
        r.lags.push_back(e);

        const double best_rho = have_best ? r.lags[static_cast<std::size_t>(r.best_lag + max_lag)].pearson : 0.0;
        if (!have_best || better(e.pearson, lag, best_rho, r.best_lag)) {
            r.best_lag = lag;
            have_best = true;
        }
        if (lag < 0 && (!have_neg || better(e.pearson, lag, r.rho_negative, r.best_negative_lag))) {
            r.best_negative_lag = lag;
            r.rho_negative = e.pearson;
            have_neg = true;
        }
    }
    r.rho_zero = r.lags.back().pearson;
    r.lead = -r.best_lag;
    r.negative_beats_zero = std::abs(r.rho_negative) > std::abs(r.rho_zero);
    return r;
}

ScalingFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw AnalysisError("regression series differ in length");
    const std::size_t n = x.size();
    if (n < 3)
        throw AnalysisError("scaling fit needs at least 3 points");
    ScalingFit f;
    f.n = n;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        f.degenerate = true;
        f.intercept = my;
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        sse += e * e;
    }
    f.r2 = std::clamp(1.0 - sse / syy, 0.0, 1.0);
    f.adjusted_r2 = 1.0 - (1.0 - f.r2) * static_cast<double>(n - 1) / static_cast<double>(n - 2);
    return f;
}

ScalingFit scaling_fit(std::span<const EpochSignals> run)
{
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& s : run) {
        if (s.epoch == 0)
            continue;
        const double n = static_cast<double>(s.simplex_counts[0]);
        x.push_back(n > 0.0 ? static_cast<double>(s.mover_count) / n : 0.0);
        y.push_back(s.footprint);
    }
    return fit_line(x, y);
}

std::vector<ComponentGroup> default_ablation_groups()
{
    return {{"betti", {Component::Betti0, Component::Betti1, Component::Betti2}},
            {"churn", {Component::Churn}},
            {"fragility", {Component::Fragility}},
            {"footprint", {Component::Footprint}}};
}

AblationReport ablation_deltas(std::span<const FeatureVector> features, std::span<const double> metric,
                               const CiWeights& weights, double alpha, ZScoreMode mode, int max_lag,
                               std::span<const ComponentGroup> groups)
{
    AblationReport out;
    const CiSeries full = compute_ci_series(features, weights, alpha, mode);
    const LagReport full_lags = lagged_correlation(full.smoothed, metric, max_lag);
    out.full_rho_negative = full_lags.rho_negative;
    out.full_best_negative_lag = full_lags.best_negative_lag;
    for (const auto& g : groups) {
        const CiWeights w = ablate(weights, g.components);
        const CiSeries series = compute_ci_series(features, w, alpha, mode);
        const LagReport lags = lagged_correlation(series.smoothed, metric, max_lag);
        AblationEntry e;
        e.name = g.name;
        e.rho_negative = lags.rho_negative;
        e.best_negative_lag = lags.best_negative_lag;
        e.delta = lags.rho_negative - full_lags.rho_negative;
        out.entries.push_back(std::move(e));
    }
    return out;
}

} // namespace mmhm
