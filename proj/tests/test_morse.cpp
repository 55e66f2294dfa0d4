#include "oracles.hpp"

#include "mmhm/complex.hpp"
#include "mmhm/morse.hpp"
#include "mmhm/synth.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace mmhm;

namespace {

SimplicialComplex from_edges(std::size_t n, std::initializer_list<std::pair<Vertex, Vertex>> edges)
{
    NeighborGraph g(n, 8);
    for (const auto& [u, v] : edges)
        g.add_edge(u, v);
    return clique_complete(g);
}

// Hollow triangle: the clique complex of a 3-cycle is filled, so use a
// complex built by hand.
SimplicialComplex hollow_triangle()
{
    SimplicialComplex c(3);
    for (Vertex v = 0; v < 3; ++v)
        c.insert(Simplex{v});
    c.insert(Simplex{0, 1});
    c.insert(Simplex{1, 2});
    c.insert(Simplex{0, 2});
    return c;
}

SimplicialComplex tetra_boundary()
{
    SimplicialComplex c(4);
    for (Vertex v = 0; v < 4; ++v)
        c.insert(Simplex{v});
    for (Vertex a = 0; a < 4; ++a)
        for (Vertex b = a + 1; b < 4; ++b)
            c.insert(Simplex{a, b});
    for (Vertex a = 0; a < 4; ++a)
        for (Vertex b = a + 1; b < 4; ++b)
            for (Vertex d = b + 1; d < 4; ++d)
                c.insert(Simplex{a, b, d});
    return c;
}

BettiNumbers engine_betti(const SimplicialComplex& c)
{
    MorseEngine e;
    e.initialize(c);
    return e.betti();
}

BettiNumbers b3(std::int64_t a, std::int64_t b, std::int64_t c)
{
    BettiNumbers out;
    out.b = {a, b, c};
    return out;
}

} // namespace

TEST_CASE("known shapes", "[morse]")
{
    REQUIRE(engine_betti(hollow_triangle()) == b3(1, 1, 0));
    REQUIRE(engine_betti(from_edges(3, {{0, 1}, {1, 2}, {0, 2}})) == b3(1, 0, 0));
    REQUIRE(engine_betti(tetra_boundary()) == b3(1, 0, 1));
    REQUIRE(engine_betti(from_edges(4, {{0, 1}, {2, 3}})) == b3(2, 0, 0));
    REQUIRE(engine_betti(from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})) == b3(1, 0, 0));
    REQUIRE(engine_betti(from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}})) == b3(1, 1, 0));

    REQUIRE(full_reduce_oracle(hollow_triangle()) == b3(1, 1, 0));
    REQUIRE(full_reduce_oracle(tetra_boundary()) == b3(1, 0, 1));
}

TEST_CASE("initial matching is valid and acyclic", "[morse]")
{
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto pts = oracle::gaussian(0, 150, 3, seed);
        const auto c = clique_complete(build_mutual_knn(pts, 8));
        const auto m = initial_matching(c);
        REQUIRE(is_valid_matching(m, c));
        REQUIRE(is_acyclic(m, c));
        // Morse inequality: critical cells bound the Betti numbers.
        const auto b = oracle::betti(oracle::cells_of(c));
        for (int d = 0; d < 3; ++d)
            REQUIRE(static_cast<std::int64_t>(m.critical(d).size()) >= b[d]);
    }
}

TEST_CASE("acyclicity check detects a V-path cycle", "[morse]")
{
    // Pairs around a hollow square: each vertex paired with the next edge,
    // closing the cycle 0 -> 1 -> 2 -> 3 -> 0.
    SimplicialComplex c(4);
    for (Vertex v = 0; v < 4; ++v)
        c.insert(Simplex{v});
    c.insert(Simplex{0, 1});
    c.insert(Simplex{1, 2});
    c.insert(Simplex{2, 3});
    c.insert(Simplex{0, 3});
    MorseMatching m;
    m.pair(Simplex{0}, Simplex{0, 1});
    m.pair(Simplex{1}, Simplex{1, 2});
    m.pair(Simplex{2}, Simplex{2, 3});
    REQUIRE(is_acyclic(m, c));
    REQUIRE(creates_cycle(m, Simplex{3}, Simplex{0, 3}));
    m.pair(Simplex{3}, Simplex{0, 3});
    REQUIRE(is_valid_matching(m, c));
    REQUIRE_FALSE(is_acyclic(m, c));
}

TEST_CASE("validity check rejects non-incident partners and stale cells", "[morse]")
{
    const auto c = hollow_triangle();
    MorseMatching m = initial_matching(c);
    REQUIRE(is_valid_matching(m, c));
    MorseMatching bad = m;
    bad.set_critical(Simplex{0, 1, 2});
    REQUIRE_FALSE(is_valid_matching(bad, c));
    MorseMatching missing;
    REQUIRE_FALSE(is_valid_matching(missing, c));
}

TEST_CASE("boundary of a boundary vanishes", "[morse]")
{
    const auto pts = oracle::gaussian(0, 100, 3, 7);
    const auto c = clique_complete(build_mutual_knn(pts, 8));
    for (int d = 2; d <= 3; ++d)
        for (const auto& s : c.simplices(d)) {
            std::map<Simplex, int> count;
            for (const auto& f : facets(s))
                for (const auto& g : facets(f))
                    ++count[g];
            for (const auto& [g, n] : count)
                REQUIRE(n % 2 == 0);
        }
}

TEST_CASE("oracle reduction agrees with dense elimination", "[morse]")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto pts = oracle::gaussian(0, 90, 4, seed);
        const auto g = build_mutual_knn(pts, 4 + seed % 3);
        const auto c = clique_complete(g);
        const auto dense = oracle::betti(oracle::cells_of(c));
        REQUIRE(full_reduce_oracle(c).b == dense);
        REQUIRE(engine_betti(c).b == dense);
        REQUIRE(static_cast<std::size_t>(dense[0]) == oracle::components(pts.rows, oracle::edge_set(g)));
    }
}

TEST_CASE("incremental updates stay exact on random trajectories", "[morse]")
{
    for (auto kind : {TrajectoryKind::Jitter, TrajectoryKind::DimensionalCollapse, TrajectoryKind::Fragmentation}) {
        TrajectorySpec spec;
        spec.kind = kind;
        spec.n = 96;
        spec.d = 6;
        spec.epochs = 30;
        spec.onset = 8;
        spec.seed = 17;
        spec.severity = 0.7;
        const auto traj = gen_trajectory(spec);
        for (std::uint32_t k : {2u, 4u, 8u})
            for (double p : {0.05, 0.5}) {
                auto state = build_fixed_scale(working_coordinates(traj.snapshots[0]), k);
                MorseEngine engine;
                engine.initialize(state.complex);
                for (std::size_t t = 1; t < traj.snapshots.size(); ++t) {
                    const auto prev = working_coordinates(traj.snapshots[t - 1]);
                    const auto cur = working_coordinates(traj.snapshots[t]);
                    const auto edits = local_edit(state, cur, compute_movers(prev, cur, p));
                    const auto up = engine.update(state.complex, edits);
                    INFO("kind " << trajectory_kind_name(kind) << " k " << k << " p " << p << " epoch " << t);
                    REQUIRE(up.betti.b == oracle::betti(oracle::cells_of(state.complex)));
                    REQUIRE(is_valid_matching(engine.matching(), state.complex));
                    REQUIRE(is_acyclic(engine.matching(), state.complex));
                    REQUIRE(engine.reduction().self_check(engine.matching(), state.complex));
                    for (int d = 1; d <= 3; ++d) {
                        REQUIRE(up.touched[d].size() >= up.edited[d] - edits.simplices_removed[d].size());
                        for (const auto& s : up.touched[d])
                            REQUIRE(state.complex.contains(s));
                    }
                }
            }
    }
}

TEST_CASE("touched sets cover every added simplex", "[morse]")
{
    TrajectorySpec spec;
    spec.n = 80;
    spec.d = 4;
    spec.epochs = 10;
    spec.seed = 3;
    spec.severity = 1.0;
    const auto traj = gen_trajectory(spec);
    auto state = build_fixed_scale(working_coordinates(traj.snapshots[0]), 6);
    MorseEngine engine;
    engine.initialize(state.complex);
    for (std::size_t t = 1; t < traj.snapshots.size(); ++t) {
        const auto edits = local_edit(state, working_coordinates(traj.snapshots[t]),
                                      compute_movers(traj.snapshots[t - 1], traj.snapshots[t], 0.2));
        const auto up = engine.update(state.complex, edits);
        for (int d = 1; d <= 3; ++d) {
            std::set<Simplex> touched(up.touched[d].begin(), up.touched[d].end());
            for (const auto& s : edits.simplices_added[d])
                REQUIRE(touched.contains(s));
        }
    }
}

TEST_CASE("recompression keeps Betti numbers and never adds critical cells", "[morse]")
{
    TrajectorySpec spec;
    spec.n = 120;
    spec.d = 5;
    spec.epochs = 12;
    spec.seed = 8;
    spec.severity = 1.0;
    const auto traj = gen_trajectory(spec);
    auto state = build_fixed_scale(working_coordinates(traj.snapshots[0]), 8);
    MorseEngine engine;
    engine.initialize(state.complex);
    for (std::size_t t = 1; t < traj.snapshots.size(); ++t) {
        const auto edits = local_edit(state, working_coordinates(traj.snapshots[t]),
                                      compute_movers(traj.snapshots[t - 1], traj.snapshots[t], 0.5));
        engine.update(state.complex, edits);
    }
    const auto before = engine.betti();
    engine.recompress(state.complex);
    REQUIRE(engine.betti() == before);
    REQUIRE(engine.matching() == initial_matching(state.complex));
    REQUIRE(is_acyclic(engine.matching(), state.complex));
}

TEST_CASE("H1 generators are cycles and independent over GF(2)", "[morse]")
{
    const auto pts = oracle::gaussian(0, 200, 3, 12);
    const auto c = clique_complete(build_mutual_knn(pts, 6));
    MorseEngine e;
    e.initialize(c);
    const auto b1 = e.betti()[1];
    const auto gens = e.h1_generators(1000);
    REQUIRE(static_cast<std::int64_t>(gens.size()) == b1);

    const auto cells = oracle::cells_of(c);
    std::map<Simplex, std::size_t> edge_index;
    for (const auto& s : cells[1])
        edge_index.emplace(s, edge_index.size());
    for (const auto& cyc : gens) {
        std::map<Vertex, int> degree;
        for (const auto& edge : cyc) {
            REQUIRE(c.contains(edge));
            ++degree[edge[0]];
            ++degree[edge[1]];
        }
        for (const auto& [v, n] : degree)
            REQUIRE(n % 2 == 0);
    }
    // Independent modulo boundaries: rank(boundaries + gens) = rank(boundaries) + b1.
    const std::size_t words = (edge_index.size() + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows;
    for (const auto& t : cells[2]) {
        std::vector<std::uint64_t> row(words, 0);
        for (const auto& f : facets(t)) {
            const auto j = edge_index.at(f);
            row[j / 64] ^= 1ULL << (j % 64);
        }
        rows.push_back(std::move(row));
    }
    const std::size_t base = oracle::gf2_rank(rows);
    for (const auto& cyc : gens) {
        std::vector<std::uint64_t> row(words, 0);
        for (const auto& edge : cyc) {
            const auto j = edge_index.at(edge);
            row[j / 64] ^= 1ULL << (j % 64);
        }
        rows.push_back(std::move(row));
    }
    REQUIRE(oracle::gf2_rank(rows) == base + gens.size());
    REQUIRE(e.h1_generators(2).size() == std::min<std::size_t>(2, gens.size()));
}

TEST_CASE("Morse boundaries from cached flows match path following", "[morse]")
{
    const auto pts = oracle::gaussian(0, 140, 3, 30);
    const auto c = clique_complete(build_mutual_knn(pts, 8));
    MorseEngine e;
    e.initialize(c);
    REQUIRE(e.reduction().self_check(e.matching(), c));
}
