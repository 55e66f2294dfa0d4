#ifndef MMHM_SIGNALS_HPP
#define MMHM_SIGNALS_HPP

#include "mmhm/complex.hpp"
#include "mmhm/morse.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

namespace mmhm {

/// Per-epoch maintenance signals.
struct EpochSignals {
    std::uint32_t epoch = 0;
    BettiNumbers betti;
    std::array<std::int64_t, 3> delta_betti{0, 0, 0}; // beta(t-1) - beta(t)
    double churn = 0.0;
    std::int64_t fragility = 0;
    std::array<double, 4> footprint_per_dim{0.0, 0.0, 0.0, 0.0}; // index 1..3
    double footprint = 0.0;
    std::size_t mover_count = 0;
    std::array<std::size_t, 4> touched_counts{0, 0, 0, 0};   // |T_d|, index 1..3
    std::array<std::size_t, 4> simplex_counts{0, 0, 0, 0};   // n_d, index 0..3
    std::size_t column_ops = 0;
    std::size_t critical_cells = 0;
    std::size_t cycles_sampled = 0;
    double wall_time = 0.0; // seconds; kept out of deterministic outputs
};

/// Result of a churn computation; `degenerate` marks an empty previous set
/// with a non-empty current one.
struct ChurnValue {
    double value = 0.0;
    bool degenerate = false;
};

/// |prev symmetric-difference cur| / |prev|.
ChurnValue churn(const std::set<Simplex>& prev, const std::set<Simplex>& cur);

/// max(1, ceil(ln V / ln(max(2, E_dir / V)))), fixed once per run.
std::int64_t radius_cap(std::size_t num_vertices, std::size_t num_directed_edges);

/// Lower median over sampled cycles of the edge-adjacency hop distance to
/// the nearest touched edge, each capped at r_cap. Returns r_cap when there
/// are no cycles or no touched edges.
std::int64_t fragility(const std::vector<Cycle>& cycles, const std::vector<Edge>& touched_edges,
                       const NeighborGraph& graph, std::int64_t r_cap);

/// Per-cycle hop distances used by fragility().
std::vector<std::int64_t> cycle_distances(const std::vector<Cycle>& cycles, const std::vector<Edge>& touched_edges,
                                          const NeighborGraph& graph, std::int64_t r_cap);

struct Footprint {
    std::array<double, 4> per_dim{0.0, 0.0, 0.0, 0.0}; // index 1..3
    double aggregate = 0.0;
};

/// B_d = |T_d| / n_d (0 when n_d = 0); aggregate over d = 1..3 weights by
/// column counts and skips empty dimensions.
Footprint footprint(const std::array<std::size_t, 4>& touched, const std::array<std::size_t, 4>& sizes);

} // namespace mmhm

#endif // MMHM_SIGNALS_HPP
