#include "mmhm/monitor.hpp"

#include "mmhm/error.hpp"
#include "mmhm/isoscore.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace mmhm {

void MonitorConfig::validate() const
{
    if (k < 1)
        throw ConfigError("k must be at least 1");
    if (!(p > 0.0 && p <= 1.0))
        throw ConfigError("mover fraction p must lie in (0, 1]");
    weights.validate();
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw ConfigError("smoothing factor alpha must lie in [0, 1)");
    if (r_cap && *r_cap < 1)
        throw ConfigError("r_cap override must be at least 1");
    if (!(recompression_threshold >= 0.0 && recompression_threshold <= 1.0))
        throw ConfigError("recompression threshold must lie in [0, 1]");
    if (recompression_patience < 1)
        throw ConfigError("recompression patience must be at least 1");
    if (threads < 1)
        throw ConfigError("thread count must be at least 1");
}

Monitor::Monitor(MonitorConfig config) : config_(config), causal_(config.weights, config.alpha)
{
    config_.validate();
}

namespace {

std::vector<Edge> touched_edges(const std::vector<Simplex>& t1)
{
    std::vector<Edge> out;
    out.reserve(t1.size());
    for (const auto& s : t1)
        out.push_back({s[0], s[1]});
    return out;
}

} // namespace

const EpochRecord& Monitor::push(const EmbeddingSnapshot& snapshot)
{
    const auto start = std::chrono::steady_clock::now();
    snapshot.validate();
    const auto expected = static_cast<std::uint32_t>(records_.size());
    if (snapshot.epoch != expected)
        throw DataError("expected epoch " + std::to_string(expected) + ", got " + std::to_string(snapshot.epoch));
    if (prev_ && (snapshot.rows != prev_->rows || snapshot.cols != prev_->cols))
        throw DataError("snapshot shape changed at epoch " + std::to_string(snapshot.epoch));

    EmbeddingSnapshot cur = working_coordinates(snapshot);
    EpochRecord rec;
    EpochSignals& s = rec.signals;
    s.epoch = snapshot.epoch;

    if (!prev_) {
        check_neighbor_count(cur.rows, config_.k);
        state_ = build_fixed_scale(cur, config_.k, config_.threads);
        s.column_ops = engine_.initialize(state_.complex);
        r_cap_ = config_.r_cap ? *config_.r_cap
                               : mmhm::radius_cap(cur.rows, 2 * state_.graph.edge_count());
        s.betti = engine_.betti();
        s.fragility = r_cap_;
        s.mover_count = cur.rows;
        for (int d = 0; d <= kMaxDim; ++d)
            s.simplex_counts[d] = state_.complex.size(d);
        for (int d = 1; d <= kMaxDim; ++d)
            s.touched_counts[d] = s.simplex_counts[d];
        const Footprint f = footprint(s.touched_counts, s.simplex_counts);
        s.footprint_per_dim = f.per_dim;
        s.footprint = f.aggregate;
    } else {
        const MoverSet movers = compute_movers(*prev_, cur, config_.p);
        const EditSet edits = local_edit(state_, cur, movers, config_.threads);
        const EngineUpdate up = engine_.update(state_.complex, edits);
        s.betti = up.betti;
        const BettiNumbers& before = records_.back().signals.betti;
        for (int d = 0; d < 3; ++d)
            s.delta_betti[d] = before[d] - s.betti[d];
        s.mover_count = movers.members.size();
        for (int d = 0; d <= kMaxDim; ++d)
            s.simplex_counts[d] = state_.complex.size(d);
        for (int d = 1; d <= kMaxDim; ++d)
            s.touched_counts[d] = up.touched[d].size();
        const Footprint f = footprint(s.touched_counts, s.simplex_counts);
        s.footprint_per_dim = f.per_dim;
        s.footprint = f.aggregate;
        s.column_ops = up.column_ops;

        const std::vector<Cycle> cycles = engine_.h1_generators(config_.cycle_sample_cap);
        s.cycles_sampled = cycles.size();
        s.fragility = fragility(cycles, touched_edges(up.touched[1]), state_.graph, r_cap_);
    }

    const std::set<Simplex> critical = engine_.critical_cells();
    s.critical_cells = critical.size();
    if (prev_)
        s.churn = churn(prev_critical_, critical).value;

    if (config_.verify) {
        const BettiNumbers oracle = full_reduce_oracle(state_.complex);
        if (!(oracle == s.betti))
            throw InvariantError("epoch " + std::to_string(s.epoch) + ": incremental Betti numbers (" +
                                 std::to_string(s.betti[0]) + "," + std::to_string(s.betti[1]) + "," +
                                 std::to_string(s.betti[2]) + ") differ from the full reduction (" +
                                 std::to_string(oracle[0]) + "," + std::to_string(oracle[1]) + "," +
                                 std::to_string(oracle[2]) + ")");
        if (!is_valid_matching(engine_.matching(), state_.complex) || !is_acyclic(engine_.matching(), state_.complex))
            throw InvariantError("epoch " + std::to_string(s.epoch) + ": gradient matching is not acyclic");
    }

    rec.isoscore = cur.cols >= 2 ? spectrum(cur).isoscore : 1.0;
    rec.features = raw_features(s);
    const bool baseline = !prev_.has_value();
    if (config_.zscore == ZScoreMode::Causal)
        rec.ci = causal_.push(rec.features, baseline);

    finish_epoch(rec, cur);
    prev_critical_ = rec.recompressed ? engine_.critical_cells() : critical;
    prev_ = std::move(cur);
    s.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records_.push_back(std::move(rec));
    return records_.back();
}

void Monitor::finish_epoch(EpochRecord& rec, const EmbeddingSnapshot&)
{
    if (!prev_)
        return;
    if (rec.signals.footprint > config_.recompression_threshold)
        ++over_threshold_;
    else
        over_threshold_ = 0;
    if (over_threshold_ >= config_.recompression_patience) {
        engine_.recompress(state_.complex);
        rec.recompressed = true;
        over_threshold_ = 0;
    }
}

CiSeries Monitor::ci_series() const
{
    std::vector<FeatureVector> features;
    features.reserve(records_.size());
    for (const auto& r : records_)
        features.push_back(r.features);
    return compute_ci_series(features, config_.weights, config_.alpha, config_.zscore, 1);
}

} // namespace mmhm
