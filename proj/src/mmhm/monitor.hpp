#ifndef MMHM_MONITOR_HPP
#define MMHM_MONITOR_HPP

#include "mmhm/collapse_index.hpp"
#include "mmhm/complex.hpp"
#include "mmhm/morse.hpp"
#include "mmhm/signals.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace mmhm {

struct MonitorConfig {
    std::uint32_t k = 8;
    double p = 0.2;
    CiWeights weights;
    double alpha = 0.2;
    std::optional<std::int64_t> r_cap; // derived from the epoch-0 graph when unset
    std::size_t cycle_sample_cap = 64;
    ZScoreMode zscore = ZScoreMode::Causal;
    double recompression_threshold = 0.5; // aggregate B
    std::uint32_t recompression_patience = 3;
    bool verify = false;
    unsigned threads = 1;

    /// Throws ConfigError.
    void validate() const;
};

struct EpochRecord {
    EpochSignals signals;
    double isoscore = 0.0;
    FeatureVector features{};
    CiPoint ci; // causal values; zero in retrospective mode until finalized
    bool recompressed = false;
};

/// Runs the per-epoch pipeline: full build at the first epoch, then movers,
/// local edit, matching repair, incremental reduction, signals, collapse
/// index and IsoScore for every following epoch.
class Monitor {
public:
    explicit Monitor(MonitorConfig config);

    /// Processes the next epoch. Snapshots must arrive with epochs 0, 1, 2, ...
    /// and a fixed shape. Throws DataError on a bad snapshot and
    /// InvariantError when verification fails.
    const EpochRecord& push(const EmbeddingSnapshot& snapshot);

    const MonitorConfig& config() const { return config_; }
    const std::vector<EpochRecord>& records() const { return records_; }
    std::int64_t radius_cap() const { return r_cap_; }
    const FixedScaleComplex& state() const { return state_; }
    const MorseEngine& engine() const { return engine_; }

    /// Collapse index over the records so far in the configured mode.
    CiSeries ci_series() const;

private:
    void finish_epoch(EpochRecord& rec, const EmbeddingSnapshot& cur);

    MonitorConfig config_;
    std::vector<EpochRecord> records_;
    std::optional<EmbeddingSnapshot> prev_;
    FixedScaleComplex state_;
    MorseEngine engine_;
    std::set<Simplex> prev_critical_;
    std::int64_t r_cap_ = 1;
    CausalCi causal_;
    std::uint32_t over_threshold_ = 0;
};

} // namespace mmhm

#endif // MMHM_MONITOR_HPP
