#ifndef MMHM_SIMPLEX_HPP
#define MMHM_SIMPLEX_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace mmhm {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

inline constexpr int kMaxDim = 3;

/// A simplex of dimension 0..3 stored as a sorted vertex tuple.
///
/// Cells are identified by their vertex tuple, never by column position, so
/// identity survives reindexing between epochs. The total order is
/// (dimension, lexicographic vertices); it fixes every "ascending index"
/// traversal and the lowest-one row order of the boundary matrices.
class Simplex {
public:
    static constexpr Vertex kUnused = std::numeric_limits<Vertex>::max();

    Simplex() = default;

    /// Builds from an arbitrary vertex list (1..4 distinct ids); sorts them.
    Simplex(std::initializer_list<Vertex> vs) : Simplex(std::span<const Vertex>(vs.begin(), vs.size())) {}

    explicit Simplex(std::span<const Vertex> vs) : dim_(static_cast<std::uint8_t>(vs.size() - 1))
    {
        std::copy(vs.begin(), vs.end(), v_.begin());
        std::sort(v_.begin(), v_.begin() + vs.size());
    }

    static Simplex vertex(Vertex a) { return Simplex{a}; }
    static Simplex edge(Vertex a, Vertex b) { return Simplex{a, b}; }

    int dim() const { return dim_; }
    std::size_t size() const { return static_cast<std::size_t>(dim_) + 1; }
    Vertex operator[](std::size_t i) const { return v_[i]; }
    std::span<const Vertex> vertices() const { return {v_.data(), size()}; }

    bool contains(Vertex x) const
    {
        for (std::size_t i = 0; i < size(); ++i)
            if (v_[i] == x)
                return true;
        return false;
    }

    /// The simplex with vertex x added (x must not already be present).
    Simplex with(Vertex x) const
    {
        std::array<Vertex, 4> tmp{};
        std::copy(v_.begin(), v_.begin() + size(), tmp.begin());
        tmp[size()] = x;
        return Simplex(std::span<const Vertex>(tmp.data(), size() + 1));
    }

    /// The facet obtained by dropping the i-th vertex.
    Simplex without(std::size_t i) const
    {
        Simplex f;
        f.dim_ = static_cast<std::uint8_t>(dim_ - 1);
        std::size_t o = 0;
        for (std::size_t j = 0; j < size(); ++j)
            if (j != i)
                f.v_[o++] = v_[j];
        return f;
    }

    friend bool operator==(const Simplex&, const Simplex&) = default;

    friend std::strong_ordering operator<=>(const Simplex& a, const Simplex& b)
    {
        if (auto c = a.dim_ <=> b.dim_; c != 0)
            return c;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (auto c = a.v_[i] <=> b.v_[i]; c != 0)
                return c;
        return std::strong_ordering::equal;
    }

    std::uint64_t hash() const
    {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ dim_;
        for (std::size_t i = 0; i < size(); ++i) {
            h ^= v_[i] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xbf58476d1ce4e5b9ULL;
            h ^= h >> 31;
        }
        return h;
    }

private:
    std::array<Vertex, 4> v_{kUnused, kUnused, kUnused, kUnused};
    std::uint8_t dim_ = 0;
};

struct SimplexHash {
    std::size_t operator()(const Simplex& s) const { return static_cast<std::size_t>(s.hash()); }
};

/// All (dim-1)-faces of s, in ascending order. Empty for vertices.
inline std::vector<Simplex> facets(const Simplex& s)
{
    std::vector<Simplex> out;
    if (s.dim() == 0)
        return out;
    out.reserve(s.size());
    for (std::size_t i = s.size(); i-- > 0;)
        out.push_back(s.without(i));
    return out;
}

/// Symmetric difference of two ascending vectors (GF(2) addition of chains).
template <class T>
void xor_into(std::vector<T>& acc, const std::vector<T>& rhs, std::vector<T>& scratch)
{
    scratch.clear();
    scratch.reserve(acc.size() + rhs.size());
    auto a = acc.begin();
    auto b = rhs.begin();
    while (a != acc.end() && b != rhs.end()) {
        if (*a < *b)
            scratch.push_back(*a++);
        else if (*b < *a)
            scratch.push_back(*b++);
        else {
            ++a;
            ++b;
        }
    }
    scratch.insert(scratch.end(), a, acc.end());
    scratch.insert(scratch.end(), b, rhs.end());
    acc.swap(scratch);
}

} // namespace mmhm

#endif // MMHM_SIMPLEX_HPP
