#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"

namespace crystal_charge {

/// Arbitrary finite set of boxes; not necessarily a partition.
using BoxSet = std::unordered_set<Box, CoordHash>;

inline std::vector<Box> sorted(const BoxSet& s) {
    std::vector<Box> out(s.begin(), s.end());
    std::sort(out.begin(), out.end());
    return out;
}

inline BoxSet set_difference(const BoxSet& a, const BoxSet& b) {
    BoxSet out;
    for (const auto& x : a)
        if (!b.contains(x)) out.insert(x);
    return out;
}

inline BoxSet set_union(const BoxSet& a, const BoxSet& b) {
    BoxSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

/// First box (in lexicographic order) that breaks the melting rule, if any.
inline std::optional<Box> first_melting_violation(const BoxSet& boxes, int n) {
    for (const auto& b : sorted(boxes)) {
        if (b.dim() != n)
            throw DimensionMismatch("box " + b.str() + " has dimension " + std::to_string(b.dim()) +
                                    ", expected " + std::to_string(n));
        if (!b.nonnegative()) return b;
        for (int k = 0; k < n; ++k)
            if (b[k] > 0 && !boxes.contains(b.minus_unit(k))) return b;
    }
    return std::nullopt;
}

/// True iff `boxes` is downward closed in Z^n_{>=0}.
inline bool is_crystal(const BoxSet& boxes, int n) { return !first_melting_violation(boxes, n); }

/// An n-dimensional partition: a finite downward-closed set of boxes.
class Crystal {
public:
    explicit Crystal(int n) : n_(n) {
        if (n < 1 || n > kMaxDim) throw DimensionMismatch("unsupported dimension " + std::to_string(n));
    }

    /// Validates the melting rule; the diagnostic names the first violating box.
    static Crystal from_boxes(int n, BoxSet boxes) {
        if (auto bad = first_melting_violation(boxes, n))
            throw InvalidPartition("box " + bad->str() + " violates the melting rule");
        Crystal c(n);
        c.boxes_ = std::move(boxes);
        return c;
    }

    static Crystal from_boxes(int n, std::span<const Box> boxes) {
        return from_boxes(n, BoxSet(boxes.begin(), boxes.end()));
    }

    int dim() const { return n_; }
    std::size_t size() const { return boxes_.size(); }
    bool empty() const { return boxes_.empty(); }
    bool contains(const Box& b) const { return boxes_.contains(b); }
    const BoxSet& boxes() const { return boxes_; }
    std::vector<Box> sorted_boxes() const { return sorted(boxes_); }

    /// b must be addable.
    void add(const Box& b) {
        if (!can_add(b)) throw InvalidPartition("box " + b.str() + " is not addable");
        boxes_.insert(b);
    }

    /// b must be removable.
    void remove(const Box& b) {
        if (!can_remove(b)) throw InvalidPartition("box " + b.str() + " is not removable");
        boxes_.erase(b);
    }

    bool can_add(const Box& b) const {
        if (b.dim() != n_ || !b.nonnegative() || contains(b)) return false;
        for (int k = 0; k < n_; ++k)
            if (b[k] > 0 && !contains(b.minus_unit(k))) return false;
        return true;
    }

    bool can_remove(const Box& b) const {
        if (!contains(b)) return false;
        for (int k = 0; k < n_; ++k)
            if (contains(b.plus_unit(k))) return false;
        return true;
    }

    /// Largest coordinate over all boxes (-1 for the empty crystal).
    int extent() const {
        int e = -1;
        for (const auto& b : boxes_) e = std::max(e, b.max());
        return e;
    }

    friend bool operator==(const Crystal& a, const Crystal& b) {
        return a.n_ == b.n_ && a.boxes_ == b.boxes_;
    }

private:
    int n_;
    BoxSet boxes_;
};

/// Positions whose insertion keeps the melting rule (the set A). Candidates
/// are the origin and the immediate successors of existing boxes.
inline std::vector<Box> addable(const Crystal& c) {
    BoxSet seen;
    std::vector<Box> out;
    auto consider = [&](const Box& b) {
        if (seen.insert(b).second && c.can_add(b)) out.push_back(b);
    };
    consider(Box(c.dim()));
    for (const auto& b : c.boxes())
        for (int k = 0; k < c.dim(); ++k) consider(b.plus_unit(k));
    std::sort(out.begin(), out.end());
    return out;
}

/// Maximal boxes (the set R).
inline std::vector<Box> removable(const Crystal& c) {
    std::vector<Box> out;
    for (const auto& b : c.boxes())
        if (c.can_remove(b)) out.push_back(b);
    std::sort(out.begin(), out.end());
    return out;
}

/// Projections of A and R (the set D). Throws ProjectionCollision if two of
/// these positions share a charge, since |C| = |D| is expected to hold.
inline std::vector<Charge> targets(const Crystal& c) {
    std::vector<Box> positions = addable(c);
    const auto rem = removable(c);
    positions.insert(positions.end(), rem.begin(), rem.end());
    std::vector<Charge> out;
    out.reserve(positions.size());
    for (const auto& b : positions) out.push_back(charge_of_box(b));
    std::sort(out.begin(), out.end());
    if (auto it = std::adjacent_find(out.begin(), out.end()); it != out.end())
        throw ProjectionCollision("two addable/removable positions project onto charge " + it->str());
    return out;
}

/// Boxes of `s` dominating `b` componentwise. `b` may have negative entries.
inline BoxSet bisect(const BoxSet& s, const Box& b) {
    BoxSet out;
    for (const auto& x : s)
        if (x.dominates(b)) out.insert(x);
    return out;
}

inline BoxSet bisect(const Crystal& c, const Box& b) { return bisect(c.boxes(), b); }

/// The 2^d boxes origin + sum_i delta_i e_{dirs_i}, delta_i in {0,1}, in
/// order of the bit index sum_i delta_i 2^i.
inline std::vector<Box> hypercube(const Box& origin, std::span<const int> dirs) {
    DirMask seen = 0;
    for (int k : dirs) {
        if (k < 0 || k >= origin.dim()) throw InvalidArgument("direction " + std::to_string(k) + " out of range");
        if (seen >> k & 1U) throw InvalidArgument("duplicate direction " + std::to_string(k));
        seen |= DirMask{1} << k;
    }
    const std::size_t d = dirs.size();
    std::vector<Box> out;
    out.reserve(std::size_t{1} << d);
    for (std::uint32_t cell = 0; cell < (std::uint32_t{1} << d); ++cell) {
        Box b = origin;
        for (std::size_t i = 0; i < d; ++i)
            if (cell >> i & 1U) b[dirs[i]] += 1;
        out.push_back(b);
    }
    return out;
}

inline std::vector<Box> hypercube(const Box& origin, DirMask dirs) {
    std::vector<int> idx;
    for (int k = 0; k < origin.dim(); ++k)
        if (dirs >> k & 1U) idx.push_back(k);
    return hypercube(origin, std::span<const int>(idx));
}

/// Classification of a surface position: d nonzero directions `dirs`.
struct SurfacePoint {
    int d = 0;
    DirMask dirs = 0;
    friend bool operator==(const SurfacePoint&, const SurfacePoint&) = default;
};

/// Membership of b in F(d, dirs): b lies outside the crystal; if some
/// component is zero, d and dirs record the nonzero pattern; if all are
/// nonzero then b - E must be occupied.
inline std::optional<SurfacePoint> surface_membership(const Crystal& c, const Box& b) {
    if (b.dim() != c.dim()) throw DimensionMismatch("box and crystal dimension differ");
    if (!b.nonnegative() || c.contains(b)) return std::nullopt;
    const DirMask dirs = b.support();
    const int d = popcount(dirs);
    if (d == c.dim() && !c.contains(b.shifted(-1))) return std::nullopt;
    return SurfacePoint{d, dirs};
}

/// Surface positions near the crystal: the frontier {0} + {x + e_k} + {x + E}
/// together with the canonical (min-zero) representative of each frontier
/// charge, kept when surface_membership accepts them.
inline std::vector<Box> surface_points(const Crystal& c) {
    BoxSet cand;
    const int n = c.dim();
    cand.insert(Box(n));
    for (const auto& x : c.boxes()) {
        for (int k = 0; k < n; ++k) cand.insert(x.plus_unit(k));
        cand.insert(x.shifted(1));
    }
    BoxSet reps;
    for (const auto& f : cand) reps.insert(charge_of_box(f).lp());
    cand.insert(reps.begin(), reps.end());
    std::vector<Box> out;
    for (const auto& b : cand)
        if (surface_membership(c, b)) out.push_back(b);
    std::sort(out.begin(), out.end());
    return out;
}

/// Adds `steps` boxes, each drawn uniformly from the current addable set.
inline Crystal grow_random(Crystal c, std::size_t steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < steps; ++i) {
        const auto options = addable(c);
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        c.add(options[pick(rng)]);
    }
    return c;
}

/// Digest of the sorted box list; stable across runs, used to tag reports.
inline std::uint64_t digest(const Crystal& c) {
    std::uint64_t h = 1469598103934665603ULL ^ static_cast<std::uint64_t>(c.dim());
    for (const auto& b : c.sorted_boxes()) {
        for (int v : b) {
            h ^= static_cast<std::uint32_t>(v);
            h *= 1099511628211ULL;
        }
        h ^= 0xffU;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace crystal_charge
