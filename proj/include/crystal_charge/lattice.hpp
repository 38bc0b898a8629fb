#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace crystal_charge {

/// Largest ambient dimension supported by the fixed-capacity coordinates.
inline constexpr int kMaxDim = 16;

/// Set of axis directions, bit k standing for e_{k+1}. Directions are 0-based.
using DirMask = std::uint32_t;

inline constexpr DirMask full_mask(int n) { return n >= 32 ? ~DirMask{0} : (DirMask{1} << n) - 1; }

inline int popcount(DirMask m) { return std::popcount(m); }

/// Integer point of Z^n with n <= kMaxDim. Unused slots are kept at zero so
/// that comparison and hashing can look at the whole array.
class Coord {
public:
    Coord() = default;

    explicit Coord(int n) : n_(check_dim(n)) {}

    Coord(std::initializer_list<int> values) : n_(check_dim(static_cast<int>(values.size()))) {
        std::copy(values.begin(), values.end(), v_.begin());
    }

    static Coord from(std::span<const int> values) {
        Coord c(static_cast<int>(values.size()));
        std::copy(values.begin(), values.end(), c.v_.begin());
        return c;
    }

    static Coord unit(int n, int k) {
        Coord c(n);
        c.v_.at(static_cast<std::size_t>(k)) = 1;
        return c;
    }

    /// The all-ones vector E.
    static Coord ones(int n) {
        Coord c(n);
        std::fill_n(c.v_.begin(), n, 1);
        return c;
    }

    /// Sum of the unit vectors named by `dirs`.
    static Coord from_mask(int n, DirMask dirs) {
        Coord c(n);
        for (int k = 0; k < n; ++k)
            if (dirs >> k & 1U) c.v_[static_cast<std::size_t>(k)] = 1;
        return c;
    }

    int dim() const { return n_; }
    int operator[](int k) const { return v_[static_cast<std::size_t>(k)]; }
    int& operator[](int k) { return v_[static_cast<std::size_t>(k)]; }

    const int* begin() const { return v_.data(); }
    const int* end() const { return v_.data() + n_; }

    int min() const { return n_ == 0 ? 0 : *std::min_element(begin(), end()); }
    int max() const { return n_ == 0 ? 0 : *std::max_element(begin(), end()); }

    bool nonnegative() const { return min() >= 0; }

    /// Componentwise x >= other.
    bool dominates(const Coord& other) const {
        for (int k = 0; k < n_; ++k)
            if (v_[static_cast<std::size_t>(k)] < other[k]) return false;
        return true;
    }

    /// Directions with a nonzero component.
    DirMask support() const {
        DirMask m = 0;
        for (int k = 0; k < n_; ++k)
            if (v_[static_cast<std::size_t>(k)] != 0) m |= DirMask{1} << k;
        return m;
    }

    Coord& operator+=(const Coord& o) {
        same_dim(o);
        for (int k = 0; k < n_; ++k) v_[static_cast<std::size_t>(k)] += o[k];
        return *this;
    }
    Coord& operator-=(const Coord& o) {
        same_dim(o);
        for (int k = 0; k < n_; ++k) v_[static_cast<std::size_t>(k)] -= o[k];
        return *this;
    }
    friend Coord operator+(Coord a, const Coord& b) { return a += b; }
    friend Coord operator-(Coord a, const Coord& b) { return a -= b; }

    /// Adds `amount` to every component (a shift along E).
    Coord shifted(int amount) const {
        Coord c = *this;
        for (int k = 0; k < n_; ++k) c.v_[static_cast<std::size_t>(k)] += amount;
        return c;
    }

    Coord plus_unit(int k) const {
        Coord c = *this;
        ++c.v_.at(static_cast<std::size_t>(k));
        return c;
    }
    Coord minus_unit(int k) const {
        Coord c = *this;
        --c.v_.at(static_cast<std::size_t>(k));
        return c;
    }
    Coord plus_mask(DirMask dirs) const {
        Coord c = *this;
        for (int k = 0; k < n_; ++k)
            if (dirs >> k & 1U) ++c.v_[static_cast<std::size_t>(k)];
        return c;
    }

    std::vector<int> to_vector() const { return {begin(), end()}; }

    std::string str() const {
        std::string s = "(";
        for (int k = 0; k < n_; ++k) {
            if (k) s += ',';
            s += std::to_string(v_[static_cast<std::size_t>(k)]);
        }
        return s + ")";
    }

    friend bool operator==(const Coord&, const Coord&) = default;

    /// Lexicographic on components; dimension breaks ties.
    friend std::strong_ordering operator<=>(const Coord& a, const Coord& b) {
        const int m = std::min(a.n_, b.n_);
        for (int k = 0; k < m; ++k)
            if (auto c = a[k] <=> b[k]; c != 0) return c;
        return a.n_ <=> b.n_;
    }

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ n_;
        for (int k = 0; k < n_; ++k) {
            h ^= static_cast<std::uint32_t>(v_[static_cast<std::size_t>(k)]);
            h *= 0xff51afd7ed558ccdULL;
            h ^= h >> 32;
        }
        return static_cast<std::size_t>(h);
    }

private:
    static std::uint8_t check_dim(int n) {
        if (n < 1 || n > kMaxDim)
            throw DimensionMismatch("dimension " + std::to_string(n) + " outside 1.." +
                                    std::to_string(kMaxDim));
        return static_cast<std::uint8_t>(n);
    }
    void same_dim(const Coord& o) const {
        if (o.n_ != n_) throw DimensionMismatch("coordinate dimensions differ");
    }

    std::array<int, kMaxDim> v_{};
    std::uint8_t n_ = 0;
};

/// Position of a box in Z^n. Boxes of a partition live in Z^n_{>=0};
/// intermediate differences may be negative.
using Box = Coord;

struct CoordHash {
    std::size_t operator()(const Coord& c) const noexcept { return c.hash(); }
};

/// A point of the projection lattice Z^n / Z E, held in its canonical form l'
/// (the representative whose smallest component is zero). Two charges are
/// equal exactly when the weights h_i, taken generic, give equal values.
class Charge {
public:
    Charge() = default;

    /// The canonical representative of raw + Z E.
    static Charge normalize(const Coord& raw) { return Charge(raw.shifted(-raw.min())); }

    /// Zero charge of Z^n.
    static Charge zero(int n) { return Charge(Coord(n)); }

    const Coord& lp() const { return lp_; }
    int dim() const { return lp_.dim(); }
    std::string str() const { return lp_.str(); }

    friend bool operator==(const Charge&, const Charge&) = default;
    friend auto operator<=>(const Charge& a, const Charge& b) { return a.lp_ <=> b.lp_; }

private:
    explicit Charge(Coord lp) : lp_(lp) {}
    Coord lp_;
};

struct ChargeHash {
    std::size_t operator()(const Charge& c) const noexcept { return c.lp().hash(); }
};

inline Charge normalize(const Coord& raw) { return Charge::normalize(raw); }

inline Charge normalize(std::span<const int> raw, int n) {
    if (static_cast<int>(raw.size()) != n)
        throw DimensionMismatch("expected a vector of length " + std::to_string(n) + ", got " +
                                std::to_string(raw.size()));
    return Charge::normalize(Coord::from(raw));
}

inline Charge charge_of_box(const Box& b) { return Charge::normalize(b); }

/// c + sum of h_k over the directions in `dirs`.
inline Charge add_dirs(const Charge& c, DirMask dirs) {
    if (dirs & ~full_mask(c.dim())) throw InvalidArgument("direction outside 0..n-1");
    return Charge::normalize(c.lp().plus_mask(dirs));
}

/// Index-list form of add_dirs; rejects repeats and out-of-range indices.
inline Charge add_dirs(const Charge& c, std::span<const int> dirs) {
    DirMask m = 0;
    for (int k : dirs) {
        if (k < 0 || k >= c.dim())
            throw InvalidArgument("direction " + std::to_string(k) + " outside 0.." +
                                  std::to_string(c.dim() - 1));
        if (m >> k & 1U) throw InvalidArgument("duplicate direction " + std::to_string(k));
        m |= DirMask{1} << k;
    }
    return add_dirs(c, m);
}

/// Directions T with to = from + sum_{k in T} h_k, if `to` is a neighbour of
/// `from`. The full direction set is never returned since E projects to zero.
inline std::optional<DirMask> neighbor_mask(const Charge& from, const Charge& to) {
    if (from.dim() != to.dim()) throw DimensionMismatch("charges of different dimension");
    const Coord delta = to.lp() - from.lp();
    const int lo = delta.min();
    DirMask m = 0;
    for (int k = 0; k < delta.dim(); ++k) {
        const int v = delta[k] - lo;
        if (v > 1) return std::nullopt;
        if (v == 1) m |= DirMask{1} << k;
    }
    return m;
}

/// d with from ->d to, i.e. to = from + h_{k_1} + ... + h_{k_d}.
/// Complement symmetry: from ->d to iff to ->(n-d) from.
inline std::optional<int> neighbor_degree(const Charge& from, const Charge& to) {
    if (auto m = neighbor_mask(from, to)) return popcount(*m);
    return std::nullopt;
}

} // namespace crystal_charge
