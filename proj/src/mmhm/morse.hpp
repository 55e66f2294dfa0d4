#ifndef MMHM_MORSE_HPP
#define MMHM_MORSE_HPP

#include "mmhm/complex.hpp"
#include "mmhm/simplex.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace mmhm {

struct BettiNumbers {
    std::array<std::int64_t, 3> b{0, 0, 0};

    std::int64_t operator[](std::size_t i) const { return b[i]; }
    friend bool operator==(const BettiNumbers&, const BettiNumbers&) = default;
};

/// Partial matching between incident cells of adjacent dimension. Cells that
/// exist in the complex but have no partner are critical.
class MorseMatching {
public:
    std::optional<Simplex> partner(const Simplex& s) const;
    bool is_paired(const Simplex& s) const { return partner_.contains(s); }
    bool is_critical(const Simplex& s) const { return critical_[s.dim()].contains(s); }

    /// The (dim+1)-cell s is paired with, if s is the lower cell of a pair.
    std::optional<Simplex> up(const Simplex& s) const;

    const std::set<Simplex>& critical(int dim) const { return critical_[dim]; }
    std::size_t critical_count() const;
    std::size_t pair_count() const { return partner_.size() / 2; }

    void pair(const Simplex& lower, const Simplex& upper);
    /// Removes any pairing of s and its partner; neither is marked critical.
    void unpair(const Simplex& s);
    void set_critical(const Simplex& s) { critical_[s.dim()].insert(s); }
    void clear_critical(const Simplex& s) { critical_[s.dim()].erase(s); }
    /// Drops every trace of s (the cell no longer exists).
    void forget(const Simplex& s);

    friend bool operator==(const MorseMatching&, const MorseMatching&) = default;

private:
    std::unordered_map<Simplex, Simplex, SimplexHash> partner_;
    std::array<std::set<Simplex>, kMaxDim + 1> critical_;
};

/// Work counters of a matching pass.
struct MatchingPassStats {
    std::size_t pairs = 0;
    std::size_t critical = 0;
    std::size_t rejected = 0; // pairs refused because they would close a V-path cycle
};

/// Greedy coreduction pass over `region`, whose cells must all be unmatched.
///
/// Repeatedly pairs the smallest free cell (exactly one remaining cofacet in
/// the region) with that cofacet. When no free cell remains, the smallest
/// top-dimensional remaining cell becomes critical. Every pair is accepted
/// only if no V-path leads from the upper cell back to the lower one, so the
/// matching stays acyclic regardless of what is matched outside the region.
MatchingPassStats match_region(MorseMatching& matching, const SimplicialComplex& complex,
                               const std::vector<Simplex>& region);

/// One-time pass over the whole complex.
MorseMatching initial_matching(const SimplicialComplex& complex);

struct RepairResult {
    std::vector<Simplex> region;  // cells re-run through the pass, ascending
    std::vector<Simplex> changed; // cells whose pairing status changed, plus added/removed cells
    MatchingPassStats stats;
};

/// Local repair after an edit. Pairs of deleted cells are dropped; their
/// surviving partners and the new cells are matched by the coreduction pass
/// together with the critical cells incident to them. Every other pair is
/// kept: pairs among surviving cells stay incident and their V-paths only
/// lose arcs, so the kept part remains acyclic and each new pair is checked.
RepairResult repair_matching(MorseMatching& matching, const SimplicialComplex& complex, const EditSet& edits);

/// True if the pair (lower, upper) would close a V-path cycle.
bool creates_cycle(const MorseMatching& matching, const Simplex& lower, const Simplex& upper);

/// Structural check: partners are incident facet/cofacet pairs present in
/// the complex, every cell is paired xor critical, no stale cells.
bool is_valid_matching(const MorseMatching& matching, const SimplicialComplex& complex);

/// Topological-sort check of the modified Hasse diagram per dimension pair.
bool is_acyclic(const MorseMatching& matching, const SimplicialComplex& complex);

/// From-scratch GF(2) reduction of the uncompressed boundary matrices.
BettiNumbers full_reduce_oracle(const SimplicialComplex& complex);

/// Ranks of the uncompressed boundary matrices d = 1..3 (index 0 unused).
std::array<std::size_t, kMaxDim + 1> boundary_ranks(const SimplicialComplex& complex);

/// A sampled 1-cycle as a set of edges of the complex.
using Cycle = std::vector<Simplex>;

struct ReductionStats {
    std::array<std::vector<Simplex>, kMaxDim + 1> rereduced; // critical columns re-reduced, d = 1..3
    std::vector<Simplex> flows_recomputed; // cells whose gradient flow was recomputed
    std::size_t flow_ops = 0;      // chain additions while recomputing flows and Morse boundaries
    std::size_t reduction_ops = 0; // column additions in the Morse boundary matrices
    std::size_t cascades = 0;      // untouched pivot holders pulled into the update
};

/// Morse-compressed boundary matrices with an order-free column reduction.
///
/// Every cell y of dimension 0..2 caches its gradient flow: y itself when
/// critical, the sum of the flows of the other facets of its partner when y
/// is matched upward, and zero when y is matched downward. The Morse boundary
/// of a critical cell is the sum of the flows of its facets.
///
/// Each column c holds that boundary and a reduced vector equal to the sum of
/// the boundaries of c and of the columns listed in its combination. Nonzero
/// reduced vectors have distinct lowest rows, so ranks are counts of nonzero
/// columns.
class ReductionState {
public:
    /// Rebuilds every flow and column from scratch.
    ReductionStats rebuild(const MorseMatching& matching, const SimplicialComplex& complex);

    /// Recomputes flows downstream of `changed` cells, stopping wherever a
    /// recomputed flow equals the cached one, then re-reduces the columns
    /// whose boundary changed, the columns whose combination used them, and
    /// (transitively) untouched pivot holders a re-reduced column collides
    /// with.
    ReductionStats update(const MorseMatching& matching, const SimplicialComplex& complex,
                          const std::vector<Simplex>& changed);

    BettiNumbers betti(const MorseMatching& matching) const;
    std::size_t rank(int dim) const;
    std::size_t column_count(int dim) const { return columns_[dim].size(); }

    /// Independent H1 representatives expanded to edges of the complex, at
    /// most `cap`, taken from kernel columns in ascending order.
    std::vector<Cycle> h1_generators(const MorseMatching& matching, std::size_t cap) const;

    /// Morse boundary of a critical cell, computed from scratch by following
    /// gradient paths.
    static std::vector<Simplex> morse_boundary(const MorseMatching& matching, const Simplex& cell);

    /// Recomputes flows and columns from scratch and checks the cached
    /// values, the reduced form and the pivot table (test helper).
    bool self_check(const MorseMatching& matching, const SimplicialComplex& complex) const;

private:
    struct Column {
        std::vector<Simplex> boundary;
        std::vector<Simplex> reduced;
        std::vector<Simplex> combination;
    };

    std::vector<Simplex> compute_flow(const MorseMatching& matching, const Simplex& y, std::size_t& ops) const;
    std::vector<Simplex> column_boundary(const Simplex& c, std::size_t& ops) const;
    void drop_column(int dim, const Simplex& c);
    void reset_column(int dim, const Simplex& c);
    void reduce(int dim, std::set<Simplex> work, ReductionStats& stats);

    std::unordered_map<Simplex, std::vector<Simplex>, SimplexHash> flow_; // nonzero flows only
    std::array<std::map<Simplex, Column>, kMaxDim + 1> columns_;
    std::array<std::unordered_map<Simplex, Simplex, SimplexHash>, kMaxDim + 1> pivots_;
    std::array<std::unordered_map<Simplex, std::unordered_set<Simplex, SimplexHash>, SimplexHash>, kMaxDim + 1>
        users_;
};

/// Result of one incremental epoch update.
struct EngineUpdate {
    BettiNumbers betti;
    std::array<std::vector<Simplex>, kMaxDim + 1> touched; // T_d, d = 1..3, cells of the current complex
    std::array<std::size_t, kMaxDim + 1> edited{};          // |S_d|: added plus removed d-simplices
    std::size_t column_ops = 0;
    std::size_t cascades = 0;
    std::vector<Simplex> repaired_region;
    std::size_t status_changes = 0; // cells whose pairing status changed
};

/// Matching plus reduction state for one run.
class MorseEngine {
public:
    /// Global matching and full reduction; returns the column operations spent.
    std::size_t initialize(const SimplicialComplex& complex);
    EngineUpdate update(const SimplicialComplex& complex, const EditSet& edits);
    /// Global rematch and full re-reduction on the current complex.
    std::size_t recompress(const SimplicialComplex& complex);

    const MorseMatching& matching() const { return matching_; }
    const ReductionState& reduction() const { return reduction_; }
    BettiNumbers betti() const { return reduction_.betti(matching_); }
    std::vector<Cycle> h1_generators(std::size_t cap) const { return reduction_.h1_generators(matching_, cap); }

    /// Critical cells of all dimensions, ascending.
    std::set<Simplex> critical_cells() const;

private:
    MorseMatching matching_;
    ReductionState reduction_;
};

} // namespace mmhm

#endif // MMHM_MORSE_HPP
