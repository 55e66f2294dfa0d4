#include "mmhm/complex.hpp"

#include "mmhm/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <thread>

namespace mmhm {

EmbeddingSnapshot::EmbeddingSnapshot(std::uint32_t epoch_, std::size_t rows_, std::size_t cols_,
                                     std::vector<double> values_, bool normalized_)
    : epoch(epoch_), rows(rows_), cols(cols_), values(std::move(values_)), normalized(normalized_)
{
}

void EmbeddingSnapshot::validate() const
{
    if (rows == 0 || cols == 0)
        throw DataError("snapshot must have N >= 1 and d >= 1");
    if (values.size() != rows * cols)
        throw DataError("snapshot payload has " + std::to_string(values.size()) + " values, expected " +
                        std::to_string(rows * cols));
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw DataError("non-finite coordinate at row " + std::to_string(i / cols) + ", column " +
                            std::to_string(i % cols));
}

EmbeddingSnapshot working_coordinates(const EmbeddingSnapshot& snapshot)
{
    EmbeddingSnapshot out = snapshot;
    if (!snapshot.normalized)
        return out;
    for (std::size_t i = 0; i < out.rows; ++i) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < out.cols; ++j)
            norm2 += out.values[i * out.cols + j] * out.values[i * out.cols + j];
        if (norm2 == 0.0)
            continue;
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t j = 0; j < out.cols; ++j)
            out.values[i * out.cols + j] *= inv;
    }
    return out;
}

double squared_distance(const EmbeddingSnapshot& s, std::size_t a, std::size_t b)
{
    const double* x = s.values.data() + a * s.cols;
    const double* y = s.values.data() + b * s.cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < s.cols; ++j) {
        const double t = x[j] - y[j];
        acc += t * t;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// NeighborGraph

bool NeighborGraph::has_edge(Vertex u, Vertex v) const
{
    const auto& a = adj_[u];
    return std::binary_search(a.begin(), a.end(), v);
}

bool NeighborGraph::add_edge(Vertex u, Vertex v)
{
    if (u == v)
        return false;
    auto& a = adj_[u];
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it != a.end() && *it == v)
        return false;
    a.insert(it, v);
    auto& b = adj_[v];
    b.insert(std::lower_bound(b.begin(), b.end(), u), u);
    ++edges_;
    return true;
}

bool NeighborGraph::remove_edge(Vertex u, Vertex v)
{
    auto& a = adj_[u];
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it == a.end() || *it != v)
        return false;
    a.erase(it);
    auto& b = adj_[v];
    b.erase(std::lower_bound(b.begin(), b.end(), u));
    --edges_;
    return true;
}

std::vector<Edge> NeighborGraph::edges() const
{
    std::vector<Edge> out;
    out.reserve(edges_);
    for (Vertex u = 0; u < adj_.size(); ++u)
        for (Vertex v : adj_[u])
            if (u < v)
                out.emplace_back(u, v);
    return out;
}

// ---------------------------------------------------------------------------
// SimplicialComplex

SimplicialComplex::SimplicialComplex(std::size_t vertex_count) : skeleton_(vertex_count, 0)
{
    cells_[0].reserve(vertex_count);
    for (Vertex v = 0; v < vertex_count; ++v)
        insert(Simplex::vertex(v));
}

std::size_t SimplicialComplex::total_size() const
{
    std::size_t n = 0;
    for (const auto& c : cells_)
        n += c.size();
    return n;
}

std::optional<std::uint32_t> SimplicialComplex::column(const Simplex& s) const
{
    const auto& idx = index_[s.dim()];
    auto it = idx.find(s);
    if (it == idx.end())
        return std::nullopt;
    return it->second;
}

void SimplicialComplex::insert(const Simplex& s)
{
    auto& idx = index_[s.dim()];
    if (idx.contains(s))
        return;
    idx.emplace(s, static_cast<std::uint32_t>(cells_[s.dim()].size()));
    cells_[s.dim()].push_back(s);
    if (s.dim() == 1)
        skeleton_.add_edge(s[0], s[1]);
}

bool SimplicialComplex::erase(const Simplex& s)
{
    auto& idx = index_[s.dim()];
    auto it = idx.find(s);
    if (it == idx.end())
        return false;
    auto& cells = cells_[s.dim()];
    const std::uint32_t slot = it->second;
    idx.erase(it);
    if (slot + 1 != cells.size()) {
        cells[slot] = cells.back();
        idx[cells[slot]] = slot;
    }
    cells.pop_back();
    if (s.dim() == 1)
        skeleton_.remove_edge(s[0], s[1]);
    return true;
}

std::vector<Simplex> SimplicialComplex::cofacets(const Simplex& s) const
{
    std::vector<Simplex> out;
    if (s.dim() >= kMaxDim)
        return out;
    auto common = skeleton_.neighbors(s[0]);
    std::vector<Vertex> cand(common.begin(), common.end());
    std::vector<Vertex> tmp;
    for (std::size_t i = 1; i < s.size(); ++i) {
        auto nb = skeleton_.neighbors(s[i]);
        tmp.clear();
        std::set_intersection(cand.begin(), cand.end(), nb.begin(), nb.end(), std::back_inserter(tmp));
        cand.swap(tmp);
    }
    for (Vertex w : cand) {
        Simplex c = s.with(w);
        if (contains(c))
            out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Simplex> SimplicialComplex::cofaces(const Simplex& s) const
{
    std::set<Simplex> seen;
    std::vector<Simplex> frontier{s};
    while (!frontier.empty()) {
        std::vector<Simplex> next;
        for (const auto& f : frontier)
            for (const auto& c : cofacets(f))
                if (seen.insert(c).second)
                    next.push_back(c);
        frontier.swap(next);
    }
    return {seen.begin(), seen.end()};
}

// ---------------------------------------------------------------------------
// Edits

std::vector<Vertex> EditSet::edited_vertices() const
{
    std::vector<Vertex> out;
    for (const auto& [u, v] : edges_added) {
        out.push_back(u);
        out.push_back(v);
    }
    for (const auto& [u, v] : edges_removed) {
        out.push_back(u);
        out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void check_neighbor_count(std::size_t vertex_count, std::uint32_t k)
{
    if (k == 0)
        throw ConfigError("k must be positive");
    if (k >= vertex_count)
        throw ConfigError("k = " + std::to_string(k) + " must be smaller than N = " + std::to_string(vertex_count));
}

std::vector<Vertex> nearest_neighbors(const EmbeddingSnapshot& points, Vertex v, std::uint32_t k)
{
    std::vector<std::pair<double, Vertex>> cand;
    cand.reserve(points.rows - 1);
    for (Vertex w = 0; w < points.rows; ++w)
        if (w != v)
            cand.emplace_back(squared_distance(points, v, w), w);
    const std::size_t take = std::min<std::size_t>(k, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
    std::vector<Vertex> out(take);
    for (std::size_t i = 0; i < take; ++i)
        out[i] = cand[i].second;
    return out;
}

namespace {

template <class Fn>
void parallel_rows(std::size_t count, unsigned threads, Fn&& fn)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count / 32 + 1)));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i)
                fn(i);
        });
    }
    for (auto& th : pool)
        th.join();
}

bool in_list(const std::vector<Vertex>& list, Vertex x)
{
    return std::find(list.begin(), list.end(), x) != list.end();
}

// Every clique (as simplex of dimension >= 1) of `g` containing edge (u, v).
void cliques_through_edge(const NeighborGraph& g, Vertex u, Vertex v, std::vector<Simplex>& out)
{
    out.push_back(Simplex::edge(u, v));
    auto nu = g.neighbors(u);
    auto nv = g.neighbors(v);
    std::vector<Vertex> common;
    std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(), std::back_inserter(common));
    for (std::size_t i = 0; i < common.size(); ++i) {
        out.push_back(Simplex{u, v, common[i]});
        for (std::size_t j = i + 1; j < common.size(); ++j)
            if (g.has_edge(common[i], common[j]))
                out.push_back(Simplex{u, v, common[i], common[j]});
    }
}

} // namespace

KnnTable knn_table(const EmbeddingSnapshot& points, std::uint32_t k, unsigned threads)
{
    KnnTable table(points.rows);
    parallel_rows(points.rows, threads,
                  [&](std::size_t i) { table[i] = nearest_neighbors(points, static_cast<Vertex>(i), k); });
    return table;
}

NeighborGraph mutual_graph(const KnnTable& table, std::uint32_t k)
{
    NeighborGraph g(table.size(), k);
    for (Vertex u = 0; u < table.size(); ++u)
        for (Vertex v : table[u])
            if (u < v && in_list(table[v], u))
                g.add_edge(u, v);
    return g;
}

NeighborGraph build_mutual_knn(const EmbeddingSnapshot& snapshot, std::uint32_t k, unsigned threads)
{
    snapshot.validate();
    check_neighbor_count(snapshot.rows, k);
    return mutual_graph(knn_table(working_coordinates(snapshot), k, threads), k);
}

SimplicialComplex clique_complete(const NeighborGraph& graph)
{
    SimplicialComplex complex(graph.vertex_count());
    const auto edges = graph.edges();
    for (const auto& [u, v] : edges)
        complex.insert(Simplex::edge(u, v));
    // Enumerate each clique once from its two smallest vertices.
    for (const auto& [u, v] : edges) {
        auto nu = graph.neighbors(u);
        auto nv = graph.neighbors(v);
        std::vector<Vertex> common;
        std::set_intersection(std::upper_bound(nu.begin(), nu.end(), v), nu.end(),
                              std::upper_bound(nv.begin(), nv.end(), v), nv.end(), std::back_inserter(common));
        for (std::size_t i = 0; i < common.size(); ++i) {
            complex.insert(Simplex{u, v, common[i]});
            for (std::size_t j = i + 1; j < common.size(); ++j)
                if (graph.has_edge(common[i], common[j]))
                    complex.insert(Simplex{u, v, common[i], common[j]});
        }
    }
    return complex;
}

MoverSet compute_movers(const EmbeddingSnapshot& prev, const EmbeddingSnapshot& cur, double p)
{
    if (!(p > 0.0 && p <= 1.0))
        throw ConfigError("mover fraction p must lie in (0, 1]");
    if (prev.rows != cur.rows || prev.cols != cur.cols)
        throw DataError("snapshot shape changed between epochs");
    if (cur.epoch != prev.epoch + 1)
        throw DataError("snapshots are not consecutive epochs");
    const std::size_t n = cur.rows;
    std::vector<std::pair<double, Vertex>> disp(n);
    for (Vertex i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cur.cols; ++j) {
            const double t = cur.values[i * cur.cols + j] - prev.values[i * prev.cols + j];
            acc += t * t;
        }
        disp[i] = {std::sqrt(acc), i};
    }
    // Small slack so that e.g. 0.29 * 100 counts as 29 movers.
    const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(p * static_cast<double>(n) + 1e-9)));
    const std::size_t take = std::min(count, n);
    std::partial_sort(disp.begin(), disp.begin() + static_cast<std::ptrdiff_t>(take), disp.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first)
                              return a.first > b.first;
                          return a.second < b.second;
                      });
    disp.resize(take);
    std::sort(disp.begin(), disp.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    MoverSet out;
    out.epoch = cur.epoch;
    for (const auto& [d, v] : disp) {
        out.members.push_back(v);
        out.displacements.push_back(d);
    }
    return out;
}

FixedScaleComplex build_fixed_scale(const EmbeddingSnapshot& points, std::uint32_t k, unsigned threads)
{
    points.validate();
    check_neighbor_count(points.rows, k);
    FixedScaleComplex state;
    state.k = k;
    state.candidates = knn_table(points, k, threads);
    state.graph = mutual_graph(state.candidates, k);
    state.complex = clique_complete(state.graph);
    return state;
}

EditSet local_edit(FixedScaleComplex& state, const EmbeddingSnapshot& cur, const MoverSet& movers, unsigned threads)
{
    if (cur.rows != state.candidates.size())
        throw DataError("snapshot size does not match the maintained complex");
    EditSet edits;
    const std::size_t n = cur.rows;

    std::vector<char> touched(n, 0);
    std::vector<Vertex> region;
    auto mark = [&](Vertex v) {
        if (!touched[v]) {
            touched[v] = 1;
            region.push_back(v);
        }
    };

    // Movers and their neighbours before the edit.
    std::vector<std::vector<Vertex>> mover_lists(movers.members.size());
    parallel_rows(movers.members.size(), threads,
                  [&](std::size_t i) { mover_lists[i] = nearest_neighbors(cur, movers.members[i], state.k); });
    for (std::size_t i = 0; i < movers.members.size(); ++i) {
        const Vertex m = movers.members[i];
        mark(m);
        for (Vertex w : state.graph.neighbors(m))
            mark(w);
    }
    std::sort(region.begin(), region.end());

    KnnTable fresh(region.size());
    parallel_rows(region.size(), threads, [&](std::size_t i) {
        const Vertex v = region[i];
        auto it = std::lower_bound(movers.members.begin(), movers.members.end(), v);
        if (it != movers.members.end() && *it == v)
            fresh[i] = mover_lists[static_cast<std::size_t>(it - movers.members.begin())];
        else
            fresh[i] = nearest_neighbors(cur, v, state.k);
    });

    // Neighbours after the edit: fresh candidates of a mover that list it back.
    std::vector<Vertex> outside;
    for (const auto& list : mover_lists)
        for (Vertex w : list)
            if (!touched[w])
                outside.push_back(w);
    std::sort(outside.begin(), outside.end());
    outside.erase(std::unique(outside.begin(), outside.end()), outside.end());
    KnnTable outside_fresh(outside.size());
    parallel_rows(outside.size(), threads,
                  [&](std::size_t i) { outside_fresh[i] = nearest_neighbors(cur, outside[i], state.k); });
    std::size_t before_after = region.size();
    for (std::size_t i = 0; i < outside.size(); ++i) {
        const bool lists_mover = std::any_of(outside_fresh[i].begin(), outside_fresh[i].end(), [&](Vertex m) {
            auto it = std::lower_bound(movers.members.begin(), movers.members.end(), m);
            if (it == movers.members.end() || *it != m)
                return false;
            return in_list(mover_lists[static_cast<std::size_t>(it - movers.members.begin())], outside[i]);
        });
        if (!lists_mover)
            continue;
        mark(outside[i]);
        fresh.push_back(std::move(outside_fresh[i]));
    }
    for (std::size_t i = 0; i < region.size(); ++i)
        state.candidates[region[i]] = std::move(fresh[i]);
    std::inplace_merge(region.begin(), region.begin() + static_cast<std::ptrdiff_t>(before_after), region.end());

    // Re-evaluate the mutual rule on pairs with a touched endpoint.
    std::set<Edge> candidates_pairs;
    for (Vertex u : region) {
        for (Vertex w : state.candidates[u])
            candidates_pairs.emplace(std::min(u, w), std::max(u, w));
        for (Vertex w : state.graph.neighbors(u))
            candidates_pairs.emplace(std::min(u, w), std::max(u, w));
    }
    for (const auto& [u, v] : candidates_pairs) {
        const bool now = in_list(state.candidates[u], v) && in_list(state.candidates[v], u);
        const bool before = state.graph.has_edge(u, v);
        if (now && !before)
            edits.edges_added.emplace_back(u, v);
        else if (!now && before)
            edits.edges_removed.emplace_back(u, v);
    }

    // Removed simplices are the cliques through a removed edge in the old graph.
    std::set<Simplex> removed;
    {
        std::vector<Simplex> buf;
        for (const auto& [u, v] : edits.edges_removed) {
            buf.clear();
            cliques_through_edge(state.graph, u, v, buf);
            removed.insert(buf.begin(), buf.end());
        }
    }
    for (const auto& [u, v] : edits.edges_removed)
        state.graph.remove_edge(u, v);
    for (const auto& [u, v] : edits.edges_added)
        state.graph.add_edge(u, v);
    std::set<Simplex> added;
    {
        std::vector<Simplex> buf;
        for (const auto& [u, v] : edits.edges_added) {
            buf.clear();
            cliques_through_edge(state.graph, u, v, buf);
            added.insert(buf.begin(), buf.end());
        }
    }

    // Remove top-down and insert bottom-up so the complex stays closed.
    for (auto it = removed.rbegin(); it != removed.rend(); ++it) {
        state.complex.erase(*it);
        edits.simplices_removed[it->dim()].push_back(*it);
    }
    for (const auto& s : added) {
        state.complex.insert(s);
        edits.simplices_added[s.dim()].push_back(s);
    }
    for (auto& v : edits.simplices_removed)
        std::sort(v.begin(), v.end());

    edits.touched_region = std::move(region);
    return edits;
}

} // namespace mmhm
