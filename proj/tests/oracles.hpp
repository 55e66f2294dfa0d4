// Independent reference implementations used by the tests. Nothing here
// calls into the library except for plain data types.
#ifndef MMHM_TESTS_ORACLES_HPP
#define MMHM_TESTS_ORACLES_HPP

#include "mmhm/complex.hpp"
#include "mmhm/morse.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using mmhm::EmbeddingSnapshot;
using mmhm::Simplex;
using mmhm::Vertex;

inline double dist2(const EmbeddingSnapshot& s, std::size_t a, std::size_t b)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < s.cols; ++j) {
        const double d = s.values[a * s.cols + j] - s.values[b * s.cols + j];
        acc += d * d;
    }
    return acc;
}

// Full sort of all distances.
inline std::vector<Vertex> knn(const EmbeddingSnapshot& s, Vertex v, std::uint32_t k)
{
    std::vector<std::pair<double, Vertex>> all;
    for (Vertex u = 0; u < s.rows; ++u)
        if (u != v)
            all.emplace_back(dist2(s, v, u), u);
    std::sort(all.begin(), all.end());
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < k && i < all.size(); ++i)
        out.push_back(all[i].second);
    return out;
}

inline std::set<std::pair<Vertex, Vertex>> mutual_edges(const EmbeddingSnapshot& s, std::uint32_t k)
{
    std::vector<std::set<Vertex>> lists(s.rows);
    for (Vertex v = 0; v < s.rows; ++v) {
        auto l = knn(s, v, k);
        lists[v].insert(l.begin(), l.end());
    }
    std::set<std::pair<Vertex, Vertex>> out;
    for (Vertex u = 0; u < s.rows; ++u)
        for (Vertex v : lists[u])
            if (u < v && lists[v].contains(u))
                out.emplace(u, v);
    return out;
}

inline std::set<std::pair<Vertex, Vertex>> edge_set(const mmhm::NeighborGraph& g)
{
    std::set<std::pair<Vertex, Vertex>> out;
    for (const auto& e : g.edges())
        out.insert(e);
    return out;
}

// Cliques by nested loops over an adjacency matrix.
inline std::array<std::set<Simplex>, 4> cliques(std::size_t n, const std::set<std::pair<Vertex, Vertex>>& edges)
{
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (const auto& [u, v] : edges)
        adj[u][v] = adj[v][u] = 1;
    std::array<std::set<Simplex>, 4> out;
    for (Vertex a = 0; a < n; ++a) {
        out[0].insert(Simplex{a});
        for (Vertex b = a + 1; b < n; ++b) {
            if (!adj[a][b])
                continue;
            out[1].insert(Simplex{a, b});
            for (Vertex c = b + 1; c < n; ++c) {
                if (!adj[a][c] || !adj[b][c])
                    continue;
                out[2].insert(Simplex{a, b, c});
                for (Vertex d = c + 1; d < n; ++d)
                    if (adj[a][d] && adj[b][d] && adj[c][d])
                        out[3].insert(Simplex{a, b, c, d});
            }
        }
    }
    return out;
}

// Dense GF(2) rank with 64-bit packed rows.
inline std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> rows)
{
    std::size_t rank = 0;
    if (rows.empty())
        return 0;
    const std::size_t words = rows[0].size();
    for (std::size_t col = 0; col < words * 64 && rank < rows.size(); ++col) {
        const std::size_t w = col / 64;
        const std::uint64_t bit = 1ULL << (col % 64);
        std::size_t piv = rank;
        while (piv < rows.size() && !(rows[piv][w] & bit))
            ++piv;
        if (piv == rows.size())
            continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && (rows[r][w] & bit))
                for (std::size_t x = 0; x < words; ++x)
                    rows[r][x] ^= rows[rank][x];
        ++rank;
    }
    return rank;
}

// Rank of the boundary map from dim-cells to (dim-1)-cells.
inline std::size_t boundary_rank(const std::set<Simplex>& cells, const std::set<Simplex>& faces)
{
    std::map<Simplex, std::size_t> index;
    for (const auto& f : faces)
        index.emplace(f, index.size());
    const std::size_t words = (faces.size() + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows;
    for (const auto& c : cells) {
        std::vector<std::uint64_t> row(words ? words : 1, 0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::size_t j = index.at(c.without(i));
            row[j / 64] ^= 1ULL << (j % 64);
        }
        rows.push_back(std::move(row));
    }
    return gf2_rank(std::move(rows));
}

inline std::array<std::int64_t, 3> betti(const std::array<std::set<Simplex>, 4>& cells)
{
    std::array<std::size_t, 4> r{0, 0, 0, 0};
    for (int d = 1; d <= 3; ++d)
        r[d] = boundary_rank(cells[d], cells[d - 1]);
    std::array<std::int64_t, 3> b{};
    for (int d = 0; d < 3; ++d)
        b[d] = static_cast<std::int64_t>(cells[d].size()) - static_cast<std::int64_t>(r[d]) -
               static_cast<std::int64_t>(r[d + 1]);
    return b;
}

inline std::array<std::set<Simplex>, 4> cells_of(const mmhm::SimplicialComplex& c)
{
    std::array<std::set<Simplex>, 4> out;
    for (int d = 0; d <= 3; ++d)
        for (const auto& s : c.simplices(d))
            out[d].insert(s);
    return out;
}

// Union-find component count.
inline std::size_t components(std::size_t n, const std::set<std::pair<Vertex, Vertex>>& edges)
{
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t count = n;
    for (const auto& [u, v] : edges) {
        const auto a = find(u), b = find(v);
        if (a != b) {
            parent[a] = b;
            --count;
        }
    }
    return count;
}

// Hop distance in the line graph from any cycle edge to the nearest touched
// edge; edges sharing an endpoint are adjacent. Capped at r_cap.
inline std::int64_t cycle_hops(const std::vector<Simplex>& cycle, const std::set<std::pair<Vertex, Vertex>>& edges,
                               const std::set<std::pair<Vertex, Vertex>>& touched, std::int64_t r_cap)
{
    std::map<std::pair<Vertex, Vertex>, std::int64_t> dist;
    std::queue<std::pair<Vertex, Vertex>> q;
    for (const auto& e : cycle) {
        const std::pair<Vertex, Vertex> p{e[0], e[1]};
        if (dist.emplace(p, 0).second)
            q.push(p);
    }
    while (!q.empty()) {
        const auto e = q.front();
        q.pop();
        const auto d = dist[e];
        if (touched.contains(e))
            return std::min(d, r_cap);
        if (d >= r_cap)
            continue;
        for (const auto& f : edges) {
            if (dist.contains(f))
                continue;
            if (f.first == e.first || f.first == e.second || f.second == e.first || f.second == e.second) {
                dist[f] = d + 1;
                q.push(f);
            }
        }
    }
    return r_cap;
}

inline EmbeddingSnapshot gaussian(std::uint32_t epoch, std::size_t n, std::size_t d, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n * d);
    for (auto& x : v)
        x = g(rng);
    return EmbeddingSnapshot(epoch, n, d, std::move(v));
}

} // namespace oracle

#endif // MMHM_TESTS_ORACLES_HPP
