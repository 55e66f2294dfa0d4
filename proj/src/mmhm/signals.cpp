#include "mmhm/signals.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace mmhm {

ChurnValue churn(const std::set<Simplex>& prev, const std::set<Simplex>& cur)
{
    std::size_t diff = 0;
    auto a = prev.begin();
    auto b = cur.begin();
    while (a != prev.end() && b != cur.end()) {
        if (*a < *b) {
            ++diff;
            ++a;
        } else if (*b < *a) {
            ++diff;
            ++b;
        } else {
            ++a;
            ++b;
        }
    }
    diff += static_cast<std::size_t>(std::distance(a, prev.end()));
    diff += static_cast<std::size_t>(std::distance(b, cur.end()));
    if (prev.empty())
        return {0.0, !cur.empty()};
    return {static_cast<double>(diff) / static_cast<double>(prev.size()), false};
}

std::int64_t radius_cap(std::size_t num_vertices, std::size_t num_directed_edges)
{
    if (num_vertices <= 1)
        return 1;
    const double v = static_cast<double>(num_vertices);
    const double branching = std::max(2.0, static_cast<double>(num_directed_edges) / v);
    const double est = std::ceil(std::log(v) / std::log(branching));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(est));
}

std::vector<std::int64_t> cycle_distances(const std::vector<Cycle>& cycles, const std::vector<Edge>& touched_edges,
                                          const NeighborGraph& graph, std::int64_t r_cap)
{
    std::vector<std::int64_t> out(cycles.size(), r_cap);
    if (cycles.empty() || touched_edges.empty())
        return out;

    // Multi-source BFS on the line graph, truncated at r_cap.
    std::map<Edge, std::int64_t> dist;
    std::deque<Edge> q;
    for (auto e : touched_edges) {
        if (e.first > e.second)
            std::swap(e.first, e.second);
        if (dist.emplace(e, 0).second)
            q.push_back(e);
    }
    while (!q.empty()) {
        const Edge e = q.front();
        q.pop_front();
        const std::int64_t de = dist[e];
        if (de >= r_cap)
            continue;
        for (Vertex x : {e.first, e.second}) {
            if (x >= graph.vertex_count())
                continue;
            for (Vertex y : graph.neighbors(x)) {
                const Edge f{std::min(x, y), std::max(x, y)};
                if (dist.emplace(f, de + 1).second)
                    q.push_back(f);
            }
        }
    }
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        std::int64_t best = r_cap;
        for (const auto& s : cycles[i]) {
            auto it = dist.find({s[0], s[1]});
            if (it != dist.end())
                best = std::min(best, it->second);
        }
        out[i] = best;
    }
    return out;
}

std::int64_t fragility(const std::vector<Cycle>& cycles, const std::vector<Edge>& touched_edges,
                       const NeighborGraph& graph, std::int64_t r_cap)
{
    if (cycles.empty() || touched_edges.empty())
        return r_cap;
    auto d = cycle_distances(cycles, touched_edges, graph, r_cap);
    std::sort(d.begin(), d.end());
    return d[(d.size() - 1) / 2];
}

Footprint footprint(const std::array<std::size_t, 4>& touched, const std::array<std::size_t, 4>& sizes)
{
    Footprint f;
    std::size_t num = 0;
    std::size_t den = 0;
    for (int d = 1; d <= 3; ++d) {
        if (sizes[d] == 0)
            continue;
        f.per_dim[d] = static_cast<double>(touched[d]) / static_cast<double>(sizes[d]);
        num += touched[d];
        den += sizes[d];
    }
    f.aggregate = den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    return f;
}

} // namespace mmhm
