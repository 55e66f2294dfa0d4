#include "oracles.hpp"

#include "mmhm/morse.hpp"
#include "mmhm/signals.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace mmhm;

namespace {

// Three disjoint triangles, each with a tail ending in a touched edge at
// line-graph distance 0, 2 and 4 from the triangle.
struct FragilityFixture {
    NeighborGraph graph{64, 8};
    std::vector<Cycle> cycles;
    std::vector<Edge> touched;

    FragilityFixture()
    {
        auto tri = [&](Vertex a, Vertex b, Vertex c) {
            graph.add_edge(a, b);
            graph.add_edge(b, c);
            graph.add_edge(a, c);
            cycles.push_back({Simplex{a, b}, Simplex{b, c}, Simplex{a, c}});
        };
        tri(0, 1, 2);
        touched.emplace_back(0, 1);

        tri(20, 21, 22);
        graph.add_edge(22, 30);
        graph.add_edge(30, 31);
        touched.emplace_back(30, 31);

        tri(40, 41, 42);
        graph.add_edge(42, 50);
        graph.add_edge(50, 51);
        graph.add_edge(51, 52);
        graph.add_edge(52, 53);
        touched.emplace_back(52, 53);
    }
};

} // namespace

TEST_CASE("churn is the symmetric difference over the previous size", "[signals]")
{
    const std::set<Simplex> a{Simplex{0}, Simplex{1}, Simplex{0, 1}, Simplex{2}};
    const std::set<Simplex> b{Simplex{0}, Simplex{1}, Simplex{3}};
    // a ^ b = {01, 2, 3}: 3 / 4.
    REQUIRE(churn(a, b).value == 0.75);
    REQUIRE(churn(a, a).value == 0.0);
    REQUIRE(churn({}, {}).value == 0.0);
    const auto d = churn({}, b);
    REQUIRE(d.degenerate);
    REQUIRE(std::isfinite(d.value));
}

TEST_CASE("fragility takes the lower median of capped hop distances", "[signals]")
{
    FragilityFixture f;
    REQUIRE(cycle_distances(f.cycles, f.touched, f.graph, 3) == std::vector<std::int64_t>{0, 2, 3});
    REQUIRE(cycle_distances(f.cycles, f.touched, f.graph, 10) == std::vector<std::int64_t>{0, 2, 4});
    REQUIRE(fragility(f.cycles, f.touched, f.graph, 3) == 2);
}

TEST_CASE("fragility edge cases", "[signals]")
{
    FragilityFixture f;
    // Every cycle contains a touched edge.
    std::vector<Edge> incident{{0, 1}, {20, 21}, {40, 42}};
    REQUIRE(fragility(f.cycles, incident, f.graph, 3) == 0);
    REQUIRE(fragility(f.cycles, {}, f.graph, 3) == 3);
    REQUIRE(fragility({}, f.touched, f.graph, 3) == 3);
    // Even count: lower median of (0, 2) is 0.
    std::vector<Cycle> two{f.cycles[0], f.cycles[1]};
    REQUIRE(fragility(two, f.touched, f.graph, 5) == 0);
}

TEST_CASE("fragility agrees with a per-cycle BFS oracle", "[signals]")
{
    const auto pts = oracle::gaussian(0, 150, 3, 4);
    const auto g = build_mutual_knn(pts, 6);
    const auto c = clique_complete(g);
    MorseEngine e;
    e.initialize(c);
    const auto cycles = e.h1_generators(40);
    REQUIRE_FALSE(cycles.empty());
    const auto edges = oracle::edge_set(g);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Edge> touched;
        std::set<std::pair<Vertex, Vertex>> tset;
        for (const auto& e2 : edges)
            if (rng() % 25 == 0) {
                touched.push_back(e2);
                tset.insert(e2);
            }
        const std::int64_t cap = radius_cap(g.vertex_count(), 2 * g.edge_count());
        const auto got = cycle_distances(cycles, touched, g, cap);
        for (std::size_t i = 0; i < cycles.size(); ++i)
            REQUIRE(got[i] == (tset.empty() ? cap : oracle::cycle_hops(cycles[i], edges, tset, cap)));
    }
}

TEST_CASE("radius cap", "[signals]")
{
    // ceil(ln 1000 / ln 8) = ceil(3.32) = 4.
    REQUIRE(radius_cap(1000, 8000) == 4);
    // Average degree below 2 falls back to base 2.
    REQUIRE(radius_cap(1000, 100) == 10);
    REQUIRE(radius_cap(1, 0) == 1);
    REQUIRE(radius_cap(2, 2) == 1);
}

TEST_CASE("footprint per dimension and aggregate", "[signals]")
{
    const auto f = footprint({0, 5, 2, 0}, {10, 20, 8, 0});
    REQUIRE(f.per_dim[1] == 0.25);
    REQUIRE(f.per_dim[2] == 0.25);
    REQUIRE(f.per_dim[3] == 0.0);
    REQUIRE(f.aggregate == 7.0 / 28.0);
    REQUIRE(footprint({0, 0, 0, 0}, {3, 0, 0, 0}).aggregate == 0.0);
    const auto full = footprint({0, 4, 3, 1}, {9, 4, 3, 1});
    REQUIRE(full.aggregate == 1.0);
}
