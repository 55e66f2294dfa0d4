#ifndef MMHM_SYNTH_HPP
#define MMHM_SYNTH_HPP

#include "mmhm/complex.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mmhm {

enum class TrajectoryKind { Jitter, DimensionalCollapse, CompleteCollapse, Fragmentation };

std::string_view trajectory_kind_name(TrajectoryKind kind);
TrajectoryKind parse_trajectory_kind(std::string_view name);

struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::Jitter;
    std::size_t n = 256;
    std::size_t d = 16;
    std::uint32_t epochs = 20;
    std::uint64_t seed = 0;
    std::uint32_t onset = 10;
    double severity = 0.5;
    std::uint32_t metric_lag = 4;
    /// Per-epoch Gaussian noise scale around the base cloud. Jitter uses
    /// noise * severity; the collapse kinds use it unscaled.
    double noise = 0.05;

    /// Throws ConfigError on an invalid spec.
    void validate() const;
};

struct Trajectory {
    std::vector<EmbeddingSnapshot> snapshots;
    std::vector<double> task_metric;
};

inline constexpr double kMetricNoise = 0.01;

/// Deterministic given the TrajectorySpec. Every coordinate is float32-representable so
/// the snapshots survive a round trip through the snapshot file format.
Trajectory gen_trajectory(const TrajectorySpec& spec);

/// 1 before onset + lag, then 1 - severity * (epochs past that point + 1),
/// floored at 0, plus uniform noise of amplitude 0.01. Constant 1 plus noise
/// for jitter.
std::vector<double> task_metric(const TrajectorySpec& spec);

} // namespace mmhm

#endif // MMHM_SYNTH_HPP
