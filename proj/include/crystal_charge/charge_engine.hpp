#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "crystal.hpp"
#include "errors.hpp"
#include "lattice.hpp"

namespace crystal_charge {

/// Pole-order contribution of one box at charge c to the charge c + h_S.
struct SingleBoxRule {
    DirMask dirs = 0;
    int order = 0;
};

/// Pole-order contribution of every p-box cluster at its cluster charge.
struct ClusterRule {
    int size = 0;
    int order = 0;
};

/// Dimension-specific bookkeeping of the charge function: which charges each
/// box and each cluster raise (pole, positive) or lower (zero, negative).
struct Recipe {
    int n = 0;
    std::optional<int> half_rank; ///< K = (n-1)/2 for odd n
    std::vector<SingleBoxRule> single_box_rules;
    std::vector<ClusterRule> cluster_rules;
    std::vector<int> order_by_mask; ///< dense lookup of single_box_rules, 2^n entries
    /// Clusters act at the charge of their base box instead of c(base) + h_S.
    /// Only the 2D recipe uses this.
    bool clusters_at_base = false;

    int single_order(DirMask dirs) const { return order_by_mask[dirs]; }
};

namespace detail {

inline Recipe finish(Recipe r) {
    r.order_by_mask.assign(std::size_t{1} << r.n, 0);
    for (const auto& rule : r.single_box_rules) r.order_by_mask[rule.dirs] += rule.order;
    return r;
}

} // namespace detail

/// Recipe for n = 2, 3, 4 (established cases) or any odd n.
inline Recipe recipe_for(int n) {
    if (n < 2 || n > kMaxDim || (n % 2 == 0 && n > 4))
        throw UnsupportedDimension("no charge function recipe for n = " + std::to_string(n) +
                                   " (supported: 2, 4 and odd n)");
    Recipe r;
    r.n = n;
    for (int i = 0; i < n; ++i) r.single_box_rules.push_back({DirMask{1} << i, +1});
    if (n == 2) {
        r.cluster_rules = {{2, -2}, {3, +2}};
        r.clusters_at_base = true;
        return detail::finish(std::move(r));
    }
    if (n == 4) {
        for (DirMask s = 1; s < (DirMask{1} << n); ++s)
            if (popcount(s) == 2 || popcount(s) == 3) r.single_box_rules.push_back({s, -1});
        r.cluster_rules = {{4, +2}, {5, -2}};
        return detail::finish(std::move(r));
    }
    const int k = (n - 1) / 2;
    r.half_rank = k;
    for (DirMask s = 1; s < (DirMask{1} << n); ++s)
        if (popcount(s) % 2 == 0 && popcount(s) <= 2 * k) r.single_box_rules.push_back({s, -1});
    for (int m = 2; m <= k; ++m) r.cluster_rules.push_back({2 * m, +1});
    return detail::finish(std::move(r));
}

/// Finitely supported map charge -> nonzero pole order.
class PoleSpectrum {
public:
    PoleSpectrum() = default;

    void add(const Charge& c, int delta) {
        if (delta == 0) return;
        auto [it, fresh] = orders_.try_emplace(c, delta);
        if (!fresh && (it->second += delta) == 0) orders_.erase(it);
    }

    int order_at(const Charge& c) const {
        auto it = orders_.find(c);
        return it == orders_.end() ? 0 : it->second;
    }

    std::size_t size() const { return orders_.size(); }
    bool empty() const { return orders_.empty(); }

    /// Entries sorted by charge.
    std::vector<std::pair<Charge, int>> entries() const {
        std::vector<std::pair<Charge, int>> out(orders_.begin(), orders_.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Charges carrying exactly order `k`, sorted.
    std::vector<Charge> charges_with_order(int k) const {
        std::vector<Charge> out;
        for (const auto& [c, o] : orders_)
            if (o == k) out.push_back(c);
        std::sort(out.begin(), out.end());
        return out;
    }

    int max_order() const {
        int m = 0;
        for (const auto& [c, o] : orders_) m = std::max(m, o);
        return m;
    }

    PoleSpectrum& operator+=(const PoleSpectrum& other) {
        for (const auto& [c, o] : other.orders_) add(c, o);
        return *this;
    }

    friend bool operator==(const PoleSpectrum& a, const PoleSpectrum& b) { return a.orders_ == b.orders_; }

private:
    std::unordered_map<Charge, int, ChargeHash> orders_;
};

/// A box with p-1 distinct successor directions; the cluster holds p boxes.
struct Cluster {
    Box base;
    DirMask dirs = 0;

    int size() const { return popcount(dirs) + 1; }
    /// c(base) + h_S, or c(base) under a base-anchored recipe.
    Charge charge(const Recipe& recipe) const {
        return recipe.clusters_at_base ? charge_of_box(base) : add_dirs(charge_of_box(base), dirs);
    }

    friend bool operator==(const Cluster&, const Cluster&) = default;
    friend std::strong_ordering operator<=>(const Cluster& a, const Cluster& b) {
        if (auto c = a.base <=> b.base; c != 0) return c;
        return indices(a.dirs) <=> indices(b.dirs);
    }

private:
    static std::vector<int> indices(DirMask m) {
        std::vector<int> out;
        for (int k = 0; k < kMaxDim; ++k)
            if (m >> k & 1U) out.push_back(k);
        return out;
    }
};

/// Successor directions of b whose boxes lie in s.
inline DirMask present_successors(const BoxSet& s, const Box& b) {
    DirMask m = 0;
    for (int k = 0; k < b.dim(); ++k)
        if (s.contains(b.plus_unit(k))) m |= DirMask{1} << k;
    return m;
}

/// Calls fn(sub) for every submask of `mask` with exactly `bits` bits set.
template <class Fn>
void for_each_submask_of_size(DirMask mask, int bits, Fn&& fn) {
    if (bits == 0) {
        fn(DirMask{0});
        return;
    }
    if (popcount(mask) < bits) return;
    for (DirMask sub = mask; sub; sub = (sub - 1) & mask)
        if (popcount(sub) == bits) fn(sub);
}

/// All p-box clusters contained in s, ordered by base then direction list.
inline std::vector<Cluster> clusters_in(const BoxSet& s, int p) {
    if (p < 2) throw InvalidArgument("cluster size must be at least 2");
    std::vector<Cluster> out;
    for (const auto& b : s)
        for_each_submask_of_size(present_successors(s, b), p - 1,
                                 [&](DirMask sub) { out.push_back({b, sub}); });
    std::sort(out.begin(), out.end());
    return out;
}

/// Visits every (charge, order delta) contribution of the boxes and clusters of s.
template <class Sink>
void for_each_contribution(const BoxSet& s, const Recipe& recipe, Sink&& sink) {
    for (const auto& b : s) {
        if (b.dim() != recipe.n) throw DimensionMismatch("box " + b.str() + " does not match recipe dimension");
        const Charge base = charge_of_box(b);
        for (const auto& rule : recipe.single_box_rules) sink(add_dirs(base, rule.dirs), rule.order);
        if (recipe.cluster_rules.empty()) continue;
        const DirMask succ = present_successors(s, b);
        for (const auto& rule : recipe.cluster_rules)
            for_each_submask_of_size(succ, rule.size - 1,
                                     [&](DirMask sub) {
                                         sink(recipe.clusters_at_base ? base : add_dirs(base, sub), rule.order);
                                     });
    }
}

/// omega_S: pole orders contributed by the set s alone (no 1/u prefactor).
inline PoleSpectrum potential_of_set(const BoxSet& s, const Recipe& recipe) {
    PoleSpectrum out;
    for_each_contribution(s, recipe, [&](const Charge& c, int delta) { out.add(c, delta); });
    return out;
}

/// omega_0: full pole spectrum of the charge function of the crystal.
inline PoleSpectrum potential(const Crystal& crystal, const Recipe& recipe) {
    if (crystal.dim() != recipe.n) throw DimensionMismatch("crystal and recipe dimension differ");
    PoleSpectrum out = potential_of_set(crystal.boxes(), recipe);
    out.add(Charge::zero(recipe.n), 1);
    return out;
}

namespace detail {

/// Direction sets S with base + h_S = target: the neighbour mask, plus the
/// full set when the two charges coincide.
template <class Fn>
void for_each_reaching_mask(const Charge& base, const Charge& target, Fn&& fn) {
    const auto m = neighbor_mask(base, target);
    if (!m) return;
    fn(*m);
    if (*m == 0) fn(full_mask(base.dim()));
}

inline bool has_all_successors(const BoxSet& s, const Box& b, DirMask dirs) {
    for (int k = 0; k < b.dim(); ++k)
        if ((dirs >> k & 1U) && !s.contains(b.plus_unit(k))) return false;
    return true;
}

inline int cluster_order(const Recipe& recipe, int size) {
    int o = 0;
    for (const auto& rule : recipe.cluster_rules)
        if (rule.size == size) o += rule.order;
    return o;
}

/// Calls fn(dirs, order) for every cluster of s based at b whose charge is c.
template <class Fn>
void for_each_cluster_at(const BoxSet& s, const Box& b, const Charge& cb, const Charge& c,
                         const Recipe& recipe, Fn&& fn) {
    if (recipe.cluster_rules.empty()) return;
    if (recipe.clusters_at_base) {
        if (cb != c) return;
        const DirMask succ = present_successors(s, b);
        for (const auto& rule : recipe.cluster_rules)
            for_each_submask_of_size(succ, rule.size - 1, [&](DirMask sub) { fn(sub, rule.order); });
        return;
    }
    for_each_reaching_mask(cb, c, [&](DirMask m) {
        if (m == 0) return;
        const int o = cluster_order(recipe, popcount(m) + 1);
        if (o != 0 && has_all_successors(s, b, m)) fn(m, o);
    });
}

} // namespace detail

/// omega_S(c) computed directly: only boxes whose charge is a neighbour of c
/// can contribute, and each contributes through exactly one direction set.
inline int omega_set_at(const BoxSet& s, const Charge& c, const Recipe& recipe) {
    if (c.dim() != recipe.n) throw DimensionMismatch("charge and recipe dimension differ");
    int total = 0;
    for (const auto& b : s) {
        const Charge cb = charge_of_box(b);
        detail::for_each_reaching_mask(cb, c, [&](DirMask m) { total += recipe.single_order(m); });
        detail::for_each_cluster_at(s, b, cb, c, recipe, [&](DirMask, int o) { total += o; });
    }
    return total;
}

/// omega_0(c) for a crystal: pole order of its charge function at c.
inline int omega_at(const Crystal& crystal, const Charge& c, const Recipe& recipe) {
    if (crystal.dim() != recipe.n) throw DimensionMismatch("crystal and recipe dimension differ");
    return (c == Charge::zero(recipe.n) ? 1 : 0) + omega_set_at(crystal.boxes(), c, recipe);
}

/// Cluster correction omega_{S1 u S2} - omega_{S1} - omega_{S2} at c: the
/// contribution of clusters with boxes in both sets.
inline int omega_cluster_between(const BoxSet& s1, const BoxSet& s2, const Charge& c, const Recipe& recipe) {
    for (const auto& b : s1)
        if (s2.contains(b)) throw InvalidArgument("sets overlap at box " + b.str());
    const BoxSet u = set_union(s1, s2);
    int total = 0;
    for (const auto& b : u) {
        detail::for_each_cluster_at(u, b, charge_of_box(b), c, recipe, [&](DirMask m, int o) {
            bool in1 = s1.contains(b), in2 = !in1;
            for (int k = 0; k < b.dim(); ++k)
                if (m >> k & 1U) (s1.contains(b.plus_unit(k)) ? in1 : in2) = true;
            if (in1 && in2) total += o;
        });
    }
    return total;
}

/// Linear factor (u - c(root))^power of the charge function, with the root
/// kept as its raw (unnormalized) coefficient vector.
struct LinearFactor {
    Coord root;
    int power = 0;
};

namespace detail {

/// Calls fn(indices) for each strictly increasing k-tuple from 0..n-1.
template <class Fn>
void for_each_combination(int n, int k, Fn&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    auto rec = [&](auto&& self, int pos, int start) -> void {
        if (pos == k) {
            fn(static_cast<const std::vector<int>&>(idx));
            return;
        }
        for (int i = start; i <= n - (k - pos); ++i) {
            idx[static_cast<std::size_t>(pos)] = i;
            self(self, pos + 1, i + 1);
        }
    };
    rec(rec, 0, 0);
}

inline Coord offset(Coord at, const std::vector<int>& dirs, int sign) {
    for (int i : dirs) at[i] += sign;
    return at;
}

} // namespace detail

/// The charge function written out as its product of linear factors, walked
/// term by term from the closed-form bonding factors.
inline std::vector<LinearFactor> charge_function_factors(const Crystal& crystal) {
    const int n = crystal.dim();
    if (n < 2 || (n % 2 == 0 && n > 4))
        throw UnsupportedDimension("no charge function for n = " + std::to_string(n));
    std::vector<LinearFactor> f;
    f.push_back({Coord(n), -1}); // 1/u
    const auto boxes = crystal.sorted_boxes();
    for (const auto& b : boxes) {
        // denominators (x - h_i), common to every dimension
        for (int i = 0; i < n; ++i) f.push_back({detail::offset(b, {i}, +1), -1});
        if (n == 3) {
            for (int i = 0; i < 3; ++i) f.push_back({detail::offset(b, {i}, -1), +1}); // (x + h_i)
        } else if (n == 4) {
            for (int i = 0; i < 4; ++i) f.push_back({detail::offset(b, {i}, -1), +1}); // (x + h_i)
            detail::for_each_combination(4, 2, [&](const std::vector<int>& ij) {
                f.push_back({detail::offset(b, ij, +1), +1}); // (x - h_i - h_j)
            });
        } else if (n >= 5) {
            for (int len = 2; len < n; len += 2)
                detail::for_each_combination(n, len, [&](const std::vector<int>& l) {
                    f.push_back({detail::offset(b, l, +1), +1});
                });
        }
    }
    // clusters: (cluster size, power of x in the cluster factor)
    std::vector<std::pair<int, int>> kinds;
    if (n == 2) kinds = {{2, +2}, {3, -2}};
    else if (n == 4) kinds = {{4, -2}, {5, +2}};
    else
        for (int m = 2; 2 * m <= n - 1; ++m) kinds.push_back({2 * m, -1});
    for (const auto& [p, power] : kinds) {
        for (const auto& b : boxes)
            detail::for_each_combination(n, p - 1, [&](const std::vector<int>& s) {
                for (int i : s)
                    if (!crystal.contains(detail::offset(b, {i}, +1))) return;
                // 2D cluster factors sit at the base box; all others at c(base) + h_S
                f.push_back({n == 2 ? b : detail::offset(b, s, +1), power});
            });
    }
    return f;
}

/// Pole spectrum read off the literal factor product. Independent of the
/// recipe tables used by potential(); the two must agree exactly.
inline PoleSpectrum factor_multiset_oracle(const Crystal& crystal, const Recipe& recipe) {
    if (crystal.dim() != recipe.n) throw DimensionMismatch("crystal and recipe dimension differ");
    std::unordered_map<Coord, int, CoordHash> exponent; // keyed by canonical root
    for (const auto& f : charge_function_factors(crystal)) exponent[charge_of_box(f.root).lp()] += f.power;
    PoleSpectrum out;
    for (const auto& [root, power] : exponent) out.add(Charge::normalize(root), -power);
    return out;
}

/// Integer weights h_i with sum zero. Scaling all h_i by a common factor does
/// not move poles, so integer weights stand in for rational ones.
class WeightSystem {
public:
    explicit WeightSystem(std::vector<mpz_class> h) : h_(std::move(h)) {
        mpz_class sum = 0;
        for (const auto& x : h_) sum += x;
        if (sum != 0) throw InvalidArgument("weights must sum to zero");
    }

    /// h_i = base^i for i = 1..n-1, h_n = -(h_1 + ... + h_{n-1}).
    static WeightSystem powers(int n, unsigned long base = 1'000'000) {
        std::vector<mpz_class> h(static_cast<std::size_t>(n));
        mpz_class p = 1, sum = 0;
        for (int i = 0; i + 1 < n; ++i) {
            p *= base;
            h[static_cast<std::size_t>(i)] = p;
            sum += p;
        }
        h.back() = -sum;
        return WeightSystem(std::move(h));
    }

    int dim() const { return static_cast<int>(h_.size()); }
    const std::vector<mpz_class>& weights() const { return h_; }

    mpz_class value(const Coord& l) const {
        mpz_class v = 0;
        for (int i = 0; i < l.dim(); ++i)
            if (l[i] != 0) v += h_[static_cast<std::size_t>(i)] * l[i];
        return v;
    }
    mpz_class value(const Charge& c) const { return value(c.lp()); }

    /// True iff distinct charges receive distinct values.
    bool separates(const std::vector<Charge>& charges) const {
        std::vector<Charge> uniq(charges);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        std::vector<mpz_class> vals;
        vals.reserve(uniq.size());
        for (const auto& c : uniq) vals.push_back(value(c));
        std::sort(vals.begin(), vals.end());
        return std::adjacent_find(vals.begin(), vals.end()) == vals.end();
    }

private:
    std::vector<mpz_class> h_;
};

/// Distinct charges of all roots of the charge function of the crystal.
inline std::vector<Charge> factor_charges(const Crystal& crystal) {
    std::vector<Charge> out;
    for (const auto& f : charge_function_factors(crystal)) out.push_back(charge_of_box(f.root));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Power weights with the smallest base >= 10^6 separating every root charge.
inline WeightSystem probe_weights(const Crystal& crystal, const std::vector<Charge>& extra = {}) {
    auto charges = factor_charges(crystal);
    charges.insert(charges.end(), extra.begin(), extra.end());
    for (unsigned long base = 1'000'000;; ++base) {
        auto w = WeightSystem::powers(crystal.dim(), base);
        if (w.separates(charges)) return w;
    }
}

/// Numeric pole orders of psi(u) for one crystal. psi is evaluated at
/// u = w(c) + delta and u = w(c) + delta/2 with delta = 2^-20; every factor
/// ratio is formed exactly, log2 of the ratios is accumulated in long double,
/// and the order is -round(log2 |psi(u1) / psi(u2)|).
class ResidueProbe {
public:
    ResidueProbe(const Crystal& crystal, const Recipe& recipe, WeightSystem w) : w_(std::move(w)) {
        if (crystal.dim() != recipe.n || w_.dim() != recipe.n)
            throw DimensionMismatch("crystal, recipe and weights must share one dimension");
        const auto factors = charge_function_factors(crystal);
        std::vector<Charge> charges;
        charges.reserve(factors.size());
        roots_.reserve(factors.size());
        for (const auto& f : factors) {
            charges.push_back(charge_of_box(f.root));
            roots_.push_back({w_.value(f.root), charges.back(), f.power});
        }
        if (!w_.separates(charges)) throw WeightCollision("weights identify two distinct charges; resample");
    }

    int order_at(const Charge& c) const {
        if (c.dim() != w_.dim()) throw DimensionMismatch("charge dimension differs from weights");
        constexpr int kDeltaBits = 20;
        const mpz_class target = w_.value(c);
        long double log2_ratio = 0;
        int exact_halvings = 0;
        mpz_class d;
        for (const auto& r : roots_) {
            d = target - r.value;
            if (d == 0) {
                if (r.charge != c) throw WeightCollision("charge " + c.str() + " collides with " + r.charge.str());
                exact_halvings += r.power; // (delta / (delta/2))^power
                continue;
            }
            // (a + delta) / (a + delta/2) = 1 + 1/D with D = a 2^(k+1) + 1, odd hence nonzero
            mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), kDeltaBits + 1);
            d += 1;
            log2_ratio += r.power * std::log1p(1.0L / static_cast<long double>(d.get_d()));
        }
        const long double total = exact_halvings + log2_ratio / std::log(2.0L);
        return -static_cast<int>(std::lround(static_cast<double>(total)));
    }

    const WeightSystem& weights() const { return w_; }

private:
    struct Root {
        mpz_class value;
        Charge charge;
        int power;
    };
    WeightSystem w_;
    std::vector<Root> roots_;
};

/// One-shot form of ResidueProbe::order_at.
inline int residue_probe(const Crystal& crystal, const Recipe& recipe, const WeightSystem& w, const Charge& c) {
    return ResidueProbe(crystal, recipe, w).order_at(c);
}

} // namespace crystal_charge
