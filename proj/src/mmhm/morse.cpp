#include "mmhm/morse.hpp"

#include "mmhm/error.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace mmhm {

// ---------------------------------------------------------------------------
// MorseMatching

std::optional<Simplex> MorseMatching::partner(const Simplex& s) const
{
    auto it = partner_.find(s);
    if (it == partner_.end())
        return std::nullopt;
    return it->second;
}

std::optional<Simplex> MorseMatching::up(const Simplex& s) const
{
    auto it = partner_.find(s);
    if (it == partner_.end() || it->second.dim() != s.dim() + 1)
        return std::nullopt;
    return it->second;
}

std::size_t MorseMatching::critical_count() const
{
    std::size_t n = 0;
    for (const auto& c : critical_)
        n += c.size();
    return n;
}

void MorseMatching::pair(const Simplex& lower, const Simplex& upper)
{
    critical_[lower.dim()].erase(lower);
    critical_[upper.dim()].erase(upper);
    partner_[lower] = upper;
    partner_[upper] = lower;
}

void MorseMatching::unpair(const Simplex& s)
{
    auto it = partner_.find(s);
    if (it == partner_.end())
        return;
    const Simplex other = it->second;
    partner_.erase(it);
    partner_.erase(other);
}

void MorseMatching::forget(const Simplex& s)
{
    unpair(s);
    critical_[s.dim()].erase(s);
}

// ---------------------------------------------------------------------------
// Matching construction

bool creates_cycle(const MorseMatching& matching, const Simplex& lower, const Simplex& upper)
{
    // Walk V-paths from `upper`: down to a facet, up through its matched cofacet.
    std::vector<Simplex> stack{upper};
    std::unordered_set<Simplex, SimplexHash> seen{upper};
    while (!stack.empty()) {
        const Simplex x = stack.back();
        stack.pop_back();
        for (const Simplex& y : facets(x)) {
            if (x == upper && y == lower)
                continue;
            if (y == lower)
                return true;
            if (auto u = matching.up(y); u && *u != x && seen.insert(*u).second)
                stack.push_back(*u);
        }
    }
    return false;
}

MatchingPassStats match_region(MorseMatching& matching, const SimplicialComplex& complex,
                               const std::vector<Simplex>& region)
{
    MatchingPassStats stats;
    std::unordered_set<Simplex, SimplexHash> alive(region.begin(), region.end());
    std::unordered_map<Simplex, int, SimplexHash> count;
    std::set<Simplex> free_cells;
    // Ordered so that begin() is the smallest cell of the highest dimension.
    std::set<std::pair<int, Simplex>> top_cells;

    for (const auto& c : region) {
        matching.clear_critical(c);
        int n = 0;
        for (const auto& cf : complex.cofacets(c))
            if (alive.contains(cf))
                ++n;
        count[c] = n;
        if (n == 1)
            free_cells.insert(c);
        else if (n == 0)
            top_cells.emplace(-c.dim(), c);
    }

    auto kill = [&](const Simplex& x) {
        alive.erase(x);
        free_cells.erase(x);
        top_cells.erase({-x.dim(), x});
        for (const auto& f : facets(x)) {
            if (!alive.contains(f))
                continue;
            int& n = count[f];
            if (n == 1) {
                free_cells.erase(f);
                top_cells.emplace(-f.dim(), f);
            } else if (n == 2) {
                free_cells.insert(f);
            }
            --n;
        }
    };

    while (!alive.empty()) {
        if (!free_cells.empty()) {
            const Simplex a = *free_cells.begin();
            free_cells.erase(free_cells.begin());
            std::optional<Simplex> b;
            for (const auto& cf : complex.cofacets(a))
                if (alive.contains(cf)) {
                    b = cf;
                    break;
                }
            if (!b)
                throw InvariantError("free cell without a remaining cofacet");
            if (!creates_cycle(matching, a, *b)) {
                matching.pair(a, *b);
                ++stats.pairs;
                kill(*b);
                kill(a);
            } else {
                ++stats.rejected;
                ++stats.critical;
                matching.set_critical(*b);
                kill(*b);
            }
            continue;
        }
        if (top_cells.empty())
            throw InvariantError("matching pass stalled");
        const Simplex c = top_cells.begin()->second;
        matching.set_critical(c);
        ++stats.critical;
        kill(c);
    }
    return stats;
}

MorseMatching initial_matching(const SimplicialComplex& complex)
{
    MorseMatching matching;
    std::vector<Simplex> all;
    all.reserve(complex.total_size());
    for (int d = 0; d <= kMaxDim; ++d)
        for (const auto& s : complex.simplices(d))
            all.push_back(s);
    std::sort(all.begin(), all.end());
    match_region(matching, complex, all);
    return matching;
}

namespace {

struct CellStatus {
    std::optional<Simplex> partner;
    bool critical = false;
    friend bool operator==(const CellStatus&, const CellStatus&) = default;
};

CellStatus status_of(const MorseMatching& m, const Simplex& s)
{
    return {m.partner(s), m.is_critical(s)};
}

} // namespace

RepairResult repair_matching(MorseMatching& matching, const SimplicialComplex& complex, const EditSet& edits)
{
    RepairResult result;
    if (edits.empty())
        return result;

    // Cells left without a partner: partners of deleted cells and new cells.
    std::set<Simplex> open;
    std::vector<Simplex> removed;
    for (int d = 1; d <= kMaxDim; ++d)
        for (const auto& s : edits.simplices_removed[d]) {
            if (auto p = matching.partner(s); p && complex.contains(*p))
                open.insert(*p);
            matching.forget(s);
            removed.push_back(s);
        }
    for (const auto& s : open)
        matching.unpair(s);
    for (int d = 1; d <= kMaxDim; ++d)
        for (const auto& s : edits.simplices_added[d])
            open.insert(s);

    // Critical neighbours of the open cells may pair with them.
    std::set<Simplex> region = open;
    for (const auto& s : open) {
        for (const auto& f : facets(s))
            if (matching.is_critical(f))
                region.insert(f);
        for (const auto& c : complex.cofacets(s))
            if (matching.is_critical(c))
                region.insert(c);
    }

    std::vector<std::pair<Simplex, CellStatus>> before;
    before.reserve(region.size());
    for (const auto& s : region)
        if (!open.contains(s))
            before.emplace_back(s, status_of(matching, s));

    result.region.assign(region.begin(), region.end());
    result.stats = match_region(matching, complex, result.region);

    result.changed = std::move(removed);
    result.changed.insert(result.changed.end(), open.begin(), open.end());
    for (const auto& [s, old] : before)
        if (!(status_of(matching, s) == old))
            result.changed.push_back(s);
    std::sort(result.changed.begin(), result.changed.end());
    result.changed.erase(std::unique(result.changed.begin(), result.changed.end()), result.changed.end());
    return result;
}

bool is_valid_matching(const MorseMatching& matching, const SimplicialComplex& complex)
{
    std::size_t cells = 0;
    for (int d = 0; d <= kMaxDim; ++d) {
        for (const auto& s : complex.simplices(d)) {
            ++cells;
            const auto p = matching.partner(s);
            const bool crit = matching.is_critical(s);
            if (p.has_value() == crit)
                return false;
            if (!p)
                continue;
            if (!complex.contains(*p) || matching.partner(*p) != s)
                return false;
            const Simplex& lo = p->dim() < s.dim() ? *p : s;
            const Simplex& hi = p->dim() < s.dim() ? s : *p;
            if (hi.dim() != lo.dim() + 1)
                return false;
            const auto fs = facets(hi);
            if (std::find(fs.begin(), fs.end(), lo) == fs.end())
                return false;
        }
        for (const auto& c : matching.critical(d))
            if (!complex.contains(c))
                return false;
    }
    return matching.critical_count() + 2 * matching.pair_count() == cells;
}

bool is_acyclic(const MorseMatching& matching, const SimplicialComplex& complex)
{
    // Any directed cycle of the modified Hasse diagram lives in two adjacent
    // levels; contract it to a graph on d-cells: y -> y' when y is matched up
    // with x and y' is another facet of x.
    for (int d = 0; d < kMaxDim; ++d) {
        std::unordered_map<Simplex, std::vector<Simplex>, SimplexHash> out;
        std::unordered_map<Simplex, int, SimplexHash> indeg;
        for (const auto& y : complex.simplices(d)) {
            indeg.try_emplace(y, 0);
            if (auto x = matching.up(y)) {
                for (const auto& z : facets(*x)) {
                    if (z == y)
                        continue;
                    out[y].push_back(z);
                    ++indeg[z];
                }
            }
        }
        std::deque<Simplex> q;
        for (const auto& [y, n] : indeg)
            if (n == 0)
                q.push_back(y);
        std::size_t done = 0;
        while (!q.empty()) {
            const Simplex y = q.front();
            q.pop_front();
            ++done;
            auto it = out.find(y);
            if (it == out.end())
                continue;
            for (const auto& z : it->second)
                if (--indeg[z] == 0)
                    q.push_back(z);
        }
        if (done != indeg.size())
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Oracle

std::array<std::size_t, kMaxDim + 1> boundary_ranks(const SimplicialComplex& complex)
{
    std::array<std::size_t, kMaxDim + 1> ranks{};
    for (int d = 1; d <= kMaxDim; ++d) {
        const auto cols = complex.simplices(d);
        std::vector<long> low_owner(complex.size(d - 1), -1);
        std::vector<std::vector<std::uint32_t>> reduced(cols.size());
        std::vector<std::uint32_t> scratch;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            auto& col = reduced[j];
            for (const auto& f : facets(cols[j]))
                col.push_back(*complex.column(f));
            std::sort(col.begin(), col.end());
            while (!col.empty()) {
                const long owner = low_owner[col.back()];
                if (owner < 0) {
                    low_owner[col.back()] = static_cast<long>(j);
                    ++ranks[d];
                    break;
                }
                xor_into(col, reduced[static_cast<std::size_t>(owner)], scratch);
            }
        }
    }
    return ranks;
}

BettiNumbers full_reduce_oracle(const SimplicialComplex& complex)
{
    const auto r = boundary_ranks(complex);
    BettiNumbers b;
    for (int d = 0; d < 3; ++d) {
        const auto rank_d = d == 0 ? 0 : r[d];
        b.b[d] = static_cast<std::int64_t>(complex.size(d)) - static_cast<std::int64_t>(rank_d) -
                 static_cast<std::int64_t>(r[d + 1]);
    }
    return b;
}

// ---------------------------------------------------------------------------
// ReductionState

namespace {

// Cells reachable along V-paths from `starts`, parents before children.
std::vector<Simplex> flow_order(const MorseMatching& matching, const std::vector<Simplex>& starts)
{
    std::vector<Simplex> post;
    std::unordered_set<Simplex, SimplexHash> seen;
    std::vector<std::pair<Simplex, std::size_t>> stack;
    std::vector<Simplex> kids;
    for (const auto& s : starts) {
        if (!seen.insert(s).second)
            continue;
        stack.emplace_back(s, 0);
        while (!stack.empty()) {
            auto& [y, next] = stack.back();
            kids.clear();
            const auto x = matching.up(y);
            if (x) {
                for (const auto& z : facets(*x))
                    if (z != y)
                        kids.push_back(z);
            }
            if (next < kids.size()) {
                const Simplex z = kids[next++];
                if (seen.insert(z).second)
                    stack.emplace_back(z, 0);
                continue;
            }
            post.push_back(y);
            stack.pop_back();
        }
    }
    std::reverse(post.begin(), post.end());
    return post;
}

} // namespace

std::vector<Simplex> ReductionState::morse_boundary(const MorseMatching& matching, const Simplex& cell)
{
    const auto start = facets(cell);
    const auto order = flow_order(matching, start);
    std::unordered_map<Simplex, char, SimplexHash> coef;
    for (const auto& f : start)
        coef[f] ^= 1;
    for (const auto& y : order) {
        auto it = coef.find(y);
        if (it == coef.end() || !it->second)
            continue;
        const auto x = matching.up(y);
        if (!x)
            continue;
        it->second = 0;
        for (const auto& z : facets(*x))
            if (z != y)
                coef[z] ^= 1;
    }
    std::vector<Simplex> out;
    for (const auto& [y, c] : coef)
        if (c && matching.is_critical(y))
            out.push_back(y);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

using CellSet = std::unordered_set<Simplex, SimplexHash>;

// Cells a flow depends on: the other facets of the upward partner.
void flow_deps(const MorseMatching& matching, const Simplex& y, std::vector<Simplex>& out)
{
    out.clear();
    if (auto x = matching.up(y))
        for (const auto& z : facets(*x))
            if (z != y)
                out.push_back(z);
}

// Cells of `cells` ordered so that dependencies inside the set come first.
std::vector<Simplex> deps_first(const MorseMatching& matching, const std::vector<Simplex>& cells, const CellSet& in)
{
    std::vector<Simplex> order;
    order.reserve(cells.size());
    CellSet seen;
    std::vector<std::pair<Simplex, std::size_t>> stack;
    std::vector<Simplex> deps;
    for (const auto& s : cells) {
        if (!seen.insert(s).second)
            continue;
        stack.emplace_back(s, 0);
        while (!stack.empty()) {
            auto& [y, next] = stack.back();
            flow_deps(matching, y, deps);
            bool descended = false;
            while (next < deps.size()) {
                const Simplex z = deps[next++];
                if (in.contains(z) && seen.insert(z).second) {
                    stack.emplace_back(z, 0);
                    descended = true;
                    break;
                }
            }
            if (descended)
                continue;
            order.push_back(y);
            stack.pop_back();
        }
    }
    return order;
}

} // namespace

std::vector<Simplex> ReductionState::compute_flow(const MorseMatching& matching, const Simplex& y,
                                                  std::size_t& ops) const
{
    if (matching.is_critical(y))
        return {y};
    const auto x = matching.up(y);
    if (!x)
        return {};
    std::vector<Simplex> acc;
    std::vector<Simplex> scratch;
    for (const auto& z : facets(*x)) {
        if (z == y)
            continue;
        auto it = flow_.find(z);
        if (it == flow_.end())
            continue;
        xor_into(acc, it->second, scratch);
        ++ops;
    }
    return acc;
}

std::vector<Simplex> ReductionState::column_boundary(const Simplex& c, std::size_t& ops) const
{
    std::vector<Simplex> acc;
    std::vector<Simplex> scratch;
    for (const auto& z : facets(c)) {
        auto it = flow_.find(z);
        if (it == flow_.end())
            continue;
        xor_into(acc, it->second, scratch);
        ++ops;
    }
    return acc;
}

void ReductionState::reset_column(int dim, const Simplex& c)
{
    auto& col = columns_[dim].at(c);
    if (!col.reduced.empty()) {
        auto it = pivots_[dim].find(col.reduced.back());
        if (it != pivots_[dim].end() && it->second == c)
            pivots_[dim].erase(it);
    }
    for (const auto& j : col.combination) {
        auto it = users_[dim].find(j);
        if (it != users_[dim].end()) {
            it->second.erase(c);
            if (it->second.empty())
                users_[dim].erase(it);
        }
    }
    col.combination.clear();
    col.reduced = col.boundary;
}

void ReductionState::drop_column(int dim, const Simplex& c)
{
    reset_column(dim, c);
    users_[dim].erase(c);
    columns_[dim].erase(c);
}

void ReductionState::reduce(int dim, std::set<Simplex> work, ReductionStats& stats)
{
    std::unordered_set<Simplex, SimplexHash> finalized;
    std::vector<Simplex> scratch;
    std::vector<Simplex> addend;
    auto& cols = columns_[dim];
    auto& pivots = pivots_[dim];
    while (!work.empty()) {
        const Simplex c = *work.begin();
        work.erase(work.begin());
        auto& col = cols.at(c);
        while (!col.reduced.empty()) {
            const Simplex low = col.reduced.back();
            auto it = pivots.find(low);
            if (it == pivots.end()) {
                pivots.emplace(low, c);
                break;
            }
            const Simplex h = it->second;
            if (finalized.contains(h)) {
                const auto& hc = cols.at(h);
                xor_into(col.reduced, hc.reduced, scratch);
                addend = hc.combination;
                addend.insert(std::lower_bound(addend.begin(), addend.end(), h), h);
                xor_into(col.combination, addend, scratch);
                ++stats.reduction_ops;
                continue;
            }
            // Untouched holder: it yields the pivot and is re-reduced as well.
            pivots.erase(it);
            reset_column(dim, h);
            work.insert(h);
            stats.rereduced[dim].push_back(h);
            ++stats.cascades;
        }
        finalized.insert(c);
        for (const auto& j : col.combination)
            users_[dim][j].insert(c);
    }
}

ReductionStats ReductionState::rebuild(const MorseMatching& matching, const SimplicialComplex& complex)
{
    ReductionStats stats;
    flow_.clear();
    for (int d = 0; d <= kMaxDim; ++d) {
        columns_[d].clear();
        pivots_[d].clear();
        users_[d].clear();
    }

    std::vector<Simplex> cells;
    CellSet in;
    for (int d = 0; d < kMaxDim; ++d)
        for (const auto& s : complex.simplices(d)) {
            cells.push_back(s);
            in.insert(s);
        }
    for (const auto& y : deps_first(matching, cells, in)) {
        auto f = compute_flow(matching, y, stats.flow_ops);
        if (!f.empty())
            flow_.emplace(y, std::move(f));
    }

    for (int d = 1; d <= kMaxDim; ++d) {
        std::set<Simplex> work;
        for (const auto& c : matching.critical(d)) {
            auto& col = columns_[d][c];
            col.boundary = column_boundary(c, stats.flow_ops);
            reset_column(d, c);
            work.insert(c);
            stats.rereduced[d].push_back(c);
        }
        reduce(d, std::move(work), stats);
    }
    for (auto& r : stats.rereduced)
        std::sort(r.begin(), r.end());
    return stats;
}

ReductionStats ReductionState::update(const MorseMatching& matching, const SimplicialComplex& complex,
                                      const std::vector<Simplex>& changed)
{
    ReductionStats stats;

    // Flows: seeds are surviving changed cells; everything upstream of them
    // along V-paths may change, but is only recomputed when a dependency did.
    CellSet seeds;
    for (const auto& x : changed) {
        if (!complex.contains(x))
            flow_.erase(x);
        else if (x.dim() < kMaxDim)
            seeds.insert(x);
    }
    CellSet affected = seeds;
    std::vector<Simplex> queue(seeds.begin(), seeds.end());
    std::sort(queue.begin(), queue.end());
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const Simplex z = queue[i];
        for (const auto& x : complex.cofacets(z)) {
            const auto p = matching.partner(x);
            if (p && p->dim() == z.dim() && *p != z && affected.insert(*p).second)
                queue.push_back(*p);
        }
    }

    CellSet flow_changed;
    std::vector<Simplex> deps;
    for (const auto& y : deps_first(matching, queue, affected)) {
        bool need = seeds.contains(y);
        if (!need) {
            flow_deps(matching, y, deps);
            for (const auto& z : deps)
                if (flow_changed.contains(z)) {
                    need = true;
                    break;
                }
        }
        if (!need)
            continue;
        auto f = compute_flow(matching, y, stats.flow_ops);
        stats.flows_recomputed.push_back(y);
        auto it = flow_.find(y);
        const bool same = it == flow_.end() ? f.empty() : it->second == f;
        if (same)
            continue;
        flow_changed.insert(y);
        if (f.empty())
            flow_.erase(y);
        else
            flow_[y] = std::move(f);
    }
    std::sort(stats.flows_recomputed.begin(), stats.flows_recomputed.end());

    std::array<std::set<Simplex>, kMaxDim + 1> dirty;
    std::array<std::set<Simplex>, kMaxDim + 1> drop;
    for (const auto& x : changed) {
        const int d = x.dim();
        if (d < 1)
            continue;
        if (matching.is_critical(x))
            dirty[d].insert(x);
        else if (columns_[d].contains(x))
            drop[d].insert(x);
    }
    for (const auto& z : flow_changed)
        for (const auto& c : complex.cofacets(z))
            if (matching.is_critical(c))
                dirty[c.dim()].insert(c);

    for (int d = 1; d <= kMaxDim; ++d) {
        std::set<Simplex> reset;
        for (const auto& c : drop[d]) {
            if (auto it = users_[d].find(c); it != users_[d].end())
                reset.insert(it->second.begin(), it->second.end());
            drop_column(d, c);
        }
        for (const auto& c : dirty[d]) {
            auto boundary = column_boundary(c, stats.flow_ops);
            auto it = columns_[d].find(c);
            if (it != columns_[d].end() && it->second.boundary == boundary)
                continue;
            columns_[d][c].boundary = std::move(boundary);
            reset.insert(c);
            if (auto u = users_[d].find(c); u != users_[d].end())
                reset.insert(u->second.begin(), u->second.end());
        }
        for (const auto& c : drop[d])
            reset.erase(c);
        for (const auto& c : reset) {
            reset_column(d, c);
            stats.rereduced[d].push_back(c);
        }
        reduce(d, std::move(reset), stats);
        std::sort(stats.rereduced[d].begin(), stats.rereduced[d].end());
        stats.rereduced[d].erase(std::unique(stats.rereduced[d].begin(), stats.rereduced[d].end()),
                                 stats.rereduced[d].end());
    }
    return stats;
}

std::size_t ReductionState::rank(int dim) const
{
    if (dim < 1 || dim > kMaxDim)
        return 0;
    return pivots_[dim].size();
}

BettiNumbers ReductionState::betti(const MorseMatching& matching) const
{
    BettiNumbers b;
    for (int d = 0; d < 3; ++d)
        b.b[d] = static_cast<std::int64_t>(matching.critical(d).size()) - static_cast<std::int64_t>(rank(d)) -
                 static_cast<std::int64_t>(rank(d + 1));
    return b;
}

std::vector<Cycle> ReductionState::h1_generators(const MorseMatching& matching, std::size_t cap) const
{
    std::vector<Cycle> out;
    if (cap == 0)
        return out;
    std::map<Simplex, std::vector<Simplex>> lows;
    for (const auto& [c, col] : columns_[2])
        if (!col.reduced.empty())
            lows.emplace(col.reduced.back(), col.reduced);

    std::vector<Simplex> scratch;
    for (const auto& [c, col] : columns_[1]) {
        if (!col.reduced.empty())
            continue;
        std::vector<Simplex> z = col.combination;
        z.insert(std::lower_bound(z.begin(), z.end(), c), c);
        std::vector<Simplex> w = z;
        while (!w.empty()) {
            auto it = lows.find(w.back());
            if (it == lows.end())
                break;
            xor_into(w, it->second, scratch);
        }
        if (w.empty())
            continue;
        lows.emplace(w.back(), w);

        // Expand critical edges to a cycle of the complex by following the
        // vertex-edge gradient paths from the endpoints.
        std::set<Simplex> edges(z.begin(), z.end());
        std::vector<Simplex> ends;
        std::unordered_map<Simplex, char, SimplexHash> coef;
        for (const auto& e : z)
            for (const auto& v : facets(e)) {
                coef[v] ^= 1;
                ends.push_back(v);
            }
        for (const auto& y : flow_order(matching, ends)) {
            auto it = coef.find(y);
            if (it == coef.end() || !it->second)
                continue;
            const auto x = matching.up(y);
            if (!x)
                continue;
            it->second = 0;
            if (!edges.erase(*x))
                edges.insert(*x);
            for (const auto& v : facets(*x))
                if (v != y)
                    coef[v] ^= 1;
        }
        for (const auto& [v, c2] : coef)
            if (c2)
                throw InvariantError("expanded H1 representative is not a cycle");
        out.emplace_back(edges.begin(), edges.end());
        if (out.size() >= cap)
            break;
    }
    return out;
}

bool ReductionState::self_check(const MorseMatching& matching, const SimplicialComplex& complex) const
{
    ReductionState fresh;
    std::vector<Simplex> cells;
    CellSet in;
    for (int d = 0; d < kMaxDim; ++d)
        for (const auto& s : complex.simplices(d)) {
            cells.push_back(s);
            in.insert(s);
        }
    std::size_t ops = 0;
    for (const auto& y : deps_first(matching, cells, in)) {
        auto f = fresh.compute_flow(matching, y, ops);
        if (!f.empty())
            fresh.flow_.emplace(y, std::move(f));
    }
    if (fresh.flow_ != flow_)
        return false;

    std::vector<Simplex> scratch;
    for (int d = 1; d <= kMaxDim; ++d) {
        if (columns_[d].size() != matching.critical(d).size())
            return false;
        std::size_t nonzero = 0;
        for (const auto& [c, col] : columns_[d]) {
            if (!matching.is_critical(c))
                return false;
            if (morse_boundary(matching, c) != col.boundary)
                return false;
            std::vector<Simplex> acc = col.boundary;
            for (const auto& j : col.combination) {
                auto it = columns_[d].find(j);
                if (it == columns_[d].end() || j == c)
                    return false;
                xor_into(acc, it->second.boundary, scratch);
            }
            if (acc != col.reduced)
                return false;
            if (!col.reduced.empty()) {
                ++nonzero;
                auto it = pivots_[d].find(col.reduced.back());
                if (it == pivots_[d].end() || it->second != c)
                    return false;
            }
        }
        if (nonzero != pivots_[d].size())
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// MorseEngine

std::size_t MorseEngine::initialize(const SimplicialComplex& complex)
{
    matching_ = initial_matching(complex);
    const ReductionStats rs = reduction_.rebuild(matching_, complex);
    return matching_.pair_count() + rs.flow_ops + rs.reduction_ops;
}

std::size_t MorseEngine::recompress(const SimplicialComplex& complex)
{
    return initialize(complex);
}

EngineUpdate MorseEngine::update(const SimplicialComplex& complex, const EditSet& edits)
{
    EngineUpdate out;
    if (edits.empty()) {
        out.betti = betti();
        return out;
    }
    RepairResult repair = repair_matching(matching_, complex, edits);
    ReductionStats rs = reduction_.update(matching_, complex, repair.changed);

    // T_d: cells whose pairing changed, critical columns re-reduced, and the
    // upward partners of cells whose flow was recomputed (the paired column
    // that was eliminated against).
    std::array<std::set<Simplex>, kMaxDim + 1> touched;
    for (const auto& s : repair.changed)
        if (s.dim() >= 1 && complex.contains(s))
            touched[s.dim()].insert(s);
    for (const auto& y : rs.flows_recomputed)
        if (auto x = matching_.up(y))
            touched[x->dim()].insert(*x);
    for (int d = 1; d <= kMaxDim; ++d) {
        touched[d].insert(rs.rereduced[d].begin(), rs.rereduced[d].end());
        out.touched[d].assign(touched[d].begin(), touched[d].end());
        out.edited[d] = edits.simplices_added[d].size() + edits.simplices_removed[d].size();
    }
    out.column_ops = repair.stats.pairs + rs.flow_ops + rs.reduction_ops;
    out.cascades = rs.cascades;
    out.status_changes = repair.changed.size();
    out.repaired_region = std::move(repair.region);
    out.betti = betti();
    return out;
}

std::set<Simplex> MorseEngine::critical_cells() const
{
    std::set<Simplex> out;
    for (int d = 0; d <= kMaxDim; ++d)
        out.insert(matching_.critical(d).begin(), matching_.critical(d).end());
    return out;
}

} // namespace mmhm
