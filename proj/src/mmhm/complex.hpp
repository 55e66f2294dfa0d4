#ifndef MMHM_COMPLEX_HPP
#define MMHM_COMPLEX_HPP

#include "mmhm/simplex.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace mmhm {

/// One epoch's N x d embedding matrix. Row i is point i in every epoch.
struct EmbeddingSnapshot {
    std::uint32_t epoch = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values; // row-major
    bool normalized = false;

    EmbeddingSnapshot() = default;
    EmbeddingSnapshot(std::uint32_t epoch, std::size_t rows, std::size_t cols, std::vector<double> values,
                      bool normalized = false);

    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }

    /// Throws DataError on empty shape, wrong payload size or non-finite entries.
    void validate() const;
};

/// The coordinates the graph is built on: rows L2-normalized when the
/// snapshot's flag is set (zero rows are left unchanged), otherwise a copy.
EmbeddingSnapshot working_coordinates(const EmbeddingSnapshot& snapshot);

/// Squared Euclidean distance between two rows.
double squared_distance(const EmbeddingSnapshot& s, std::size_t a, std::size_t b);

/// Per-vertex k-nearest-neighbour lists, each ordered by (distance, id).
using KnnTable = std::vector<std::vector<Vertex>>;

/// Undirected simple graph with sorted adjacency lists.
class NeighborGraph {
public:
    NeighborGraph() = default;
    NeighborGraph(std::size_t vertex_count, std::uint32_t k) : k_(k), adj_(vertex_count) {}

    std::uint32_t k() const { return k_; }
    std::size_t vertex_count() const { return adj_.size(); }
    std::size_t edge_count() const { return edges_; }

    bool has_edge(Vertex u, Vertex v) const;
    bool add_edge(Vertex u, Vertex v);
    bool remove_edge(Vertex u, Vertex v);

    std::span<const Vertex> neighbors(Vertex v) const { return adj_[v]; }

    /// All edges (u, v) with u < v in ascending order.
    std::vector<Edge> edges() const;

    friend bool operator==(const NeighborGraph&, const NeighborGraph&) = default;

private:
    std::uint32_t k_ = 0;
    std::vector<std::vector<Vertex>> adj_;
    std::size_t edges_ = 0;
};

/// Clique complex of a graph truncated at dimension 3.
///
/// Per dimension the simplices occupy dense column indices [0, n_d). Removal
/// moves the last column into the freed slot, so indices only change where
/// edits occur. The complex owns a copy of its 1-skeleton for coface queries.
class SimplicialComplex {
public:
    SimplicialComplex() = default;
    explicit SimplicialComplex(std::size_t vertex_count);

    std::size_t vertex_count() const { return skeleton_.vertex_count(); }
    std::size_t size(int dim) const { return cells_[dim].size(); }
    std::size_t total_size() const;
    std::span<const Simplex> simplices(int dim) const { return cells_[dim]; }

    bool contains(const Simplex& s) const { return index_[s.dim()].contains(s); }
    std::optional<std::uint32_t> column(const Simplex& s) const;

    /// Inserting an edge also updates the skeleton; its vertices must exist.
    void insert(const Simplex& s);
    bool erase(const Simplex& s);

    const NeighborGraph& skeleton() const { return skeleton_; }

    /// Stored (dim+1)-simplices having s as a facet, in ascending order.
    std::vector<Simplex> cofacets(const Simplex& s) const;

    /// Every stored simplex containing s (s itself excluded), ascending.
    std::vector<Simplex> cofaces(const Simplex& s) const;

private:
    std::array<std::vector<Simplex>, kMaxDim + 1> cells_;
    std::array<std::unordered_map<Simplex, std::uint32_t, SimplexHash>, kMaxDim + 1> index_;
    NeighborGraph skeleton_;
};

/// Points that moved most between two consecutive epochs.
struct MoverSet {
    std::uint32_t epoch = 0;
    std::vector<Vertex> members;       // ascending ids
    std::vector<double> displacements; // aligned with members
};

/// Difference between the complexes of two consecutive epochs.
struct EditSet {
    std::vector<Edge> edges_added;
    std::vector<Edge> edges_removed;
    std::array<std::vector<Simplex>, kMaxDim + 1> simplices_added;   // d = 1..3
    std::array<std::vector<Simplex>, kMaxDim + 1> simplices_removed; // d = 1..3
    std::vector<Vertex> touched_region; // ascending

    /// True when the 1-skeleton (hence the clique complex) did not change.
    bool empty() const { return edges_added.empty() && edges_removed.empty(); }

    /// Endpoints of all added or removed edges, ascending.
    std::vector<Vertex> edited_vertices() const;
};

/// Exact k nearest neighbours of v among all other rows, ties by smaller id.
std::vector<Vertex> nearest_neighbors(const EmbeddingSnapshot& points, Vertex v, std::uint32_t k);

/// Neighbour lists for every vertex. Rows are split across up to `threads`
/// workers; the result does not depend on the split.
KnnTable knn_table(const EmbeddingSnapshot& points, std::uint32_t k, unsigned threads = 1);

/// Mutual rule: u ~ v iff each is among the other's k nearest.
NeighborGraph mutual_graph(const KnnTable& table, std::uint32_t k);

/// Mutual-kNN graph of a snapshot (working coordinates are applied).
NeighborGraph build_mutual_knn(const EmbeddingSnapshot& snapshot, std::uint32_t k, unsigned threads = 1);

/// All vertices, edges, 3-cliques and 4-cliques of the graph.
SimplicialComplex clique_complete(const NeighborGraph& graph);

/// Top max(1, floor(p N)) points by displacement, ties by ascending id.
MoverSet compute_movers(const EmbeddingSnapshot& prev, const EmbeddingSnapshot& cur, double p);

/// State carried between epochs by the fixed-scale construction: the stored
/// neighbour candidacy of every vertex, the graph and its clique complex.
struct FixedScaleComplex {
    std::uint32_t k = 0;
    KnnTable candidates;
    NeighborGraph graph;
    SimplicialComplex complex;
};

/// Full build at one epoch. `points` must already be working coordinates.
FixedScaleComplex build_fixed_scale(const EmbeddingSnapshot& points, std::uint32_t k, unsigned threads = 1);

/// Sparse update around the movers.
///
/// The touched region is the movers and their graph neighbours before and
/// after the edit; a vertex outside the old neighbourhood joins when it and
/// a mover list each other under fresh candidacy. Candidacy is recomputed exactly for
/// every touched vertex, and the mutual rule is re-evaluated for every pair
/// with at least one touched endpoint. Pairs between two untouched vertices
/// keep their previous status. Simplices are refreshed only around edges
/// whose status changed, so the result is always the clique complex of the
/// updated graph. `cur` must be working coordinates.
EditSet local_edit(FixedScaleComplex& state, const EmbeddingSnapshot& cur, const MoverSet& movers,
                   unsigned threads = 1);

/// Validates k against the vertex count; throws ConfigError.
void check_neighbor_count(std::size_t vertex_count, std::uint32_t k);

} // namespace mmhm

#endif // MMHM_COMPLEX_HPP
