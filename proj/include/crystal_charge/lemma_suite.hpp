#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "charge_engine.hpp"
#include "crystal.hpp"
#include "cube_ideal.hpp"
#include "lattice.hpp"

namespace crystal_charge {

/// Outcome of one conjecture or lemma check. Failing reports carry the box
/// list of the crystal so the instance can be replayed.
struct LemmaReport {
    std::string lemma;
    int n = 0;
    std::uint64_t crystal_digest = 0;
    std::size_t crystal_size = 0;
    std::optional<Box> box;
    std::optional<int> d;
    DirMask dirs = 0;
    std::optional<std::uint64_t> seed;
    bool pass = false;
    std::string observed;
    std::string expected;
    std::vector<Box> replay_boxes;
};

namespace detail {

inline LemmaReport make_report(std::string lemma, const Crystal& c, bool pass, std::string observed,
                               std::string expected) {
    LemmaReport r;
    r.lemma = std::move(lemma);
    r.n = c.dim();
    r.crystal_digest = digest(c);
    r.crystal_size = c.size();
    r.pass = pass;
    r.observed = std::move(observed);
    r.expected = std::move(expected);
    if (!pass) r.replay_boxes = c.sorted_boxes();
    return r;
}

inline std::string join(const std::vector<Charge>& cs) {
    std::string s = "{";
    for (std::size_t i = 0; i < cs.size(); ++i) s += (i ? " " : "") + cs[i].str();
    return s + "}";
}

} // namespace detail

/// Membership of the crystal in G(b): some addable or removable position
/// shares the charge of b. Computed from the melting rule directly.
inline bool in_G(const Crystal& c, const Box& b) {
    const Charge target = charge_of_box(b);
    for (const auto& x : addable(c))
        if (charge_of_box(x) == target) return true;
    for (const auto& x : removable(c))
        if (charge_of_box(x) == target) return true;
    return false;
}

/// Closed-form list of the cube ideals lying in G(top corner):
/// {empty, {0}, HC - {top}, HC} when d = n and {HC - {top}, HC} when d < n.
inline bool hypercube_G_shortcut(const CubeIdeal& ideal, int n) {
    const std::size_t full = ideal.cell_count();
    const bool whole = ideal.size() == full;
    const bool all_but_top = ideal.size() + 1 == full && !ideal.contains(ideal.top_cell());
    if (whole || all_but_top) return true;
    if (ideal.dim() == n) return ideal.size() == 0 || (ideal.size() == 1 && ideal.contains(0));
    return false;
}

/// The closed-form list agrees with in_G computed on the embedded crystal.
inline bool shortcut_agrees(const CubeIdeal& ideal, int n) {
    return hypercube_G_shortcut(ideal, n) == in_G(ideal.embed(n), ideal.top_box(n));
}

/// Simple poles only, and the simple-pole charges are exactly targets(c).
inline LemmaReport check_conjecture(const Crystal& c, const Recipe& recipe) {
    const PoleSpectrum spectrum = potential(c, recipe);
    const auto poles = spectrum.charges_with_order(1);
    const auto expected = targets(c);
    const int max_order = spectrum.max_order();
    const bool pass = max_order <= 1 && poles == expected;
    std::string observed = "max_order=" + std::to_string(max_order) + " simple_poles=" + std::to_string(poles.size());
    std::string wanted = "max_order<=1 simple_poles=" + std::to_string(expected.size());
    if (!pass) {
        observed += " " + detail::join(poles);
        wanted += " " + detail::join(expected);
    }
    return detail::make_report("conjecture", c, pass, std::move(observed), std::move(wanted));
}

/// Removing the bisect L(c, b) leaves a partition.
inline LemmaReport check_lemma1(const Crystal& c, const Box& b) {
    const BoxSet rest = set_difference(c.boxes(), bisect(c, b));
    const bool pass = is_crystal(rest, c.dim());
    auto r = detail::make_report("lemma1", c, pass, pass ? "partition" : "not a partition", "partition");
    r.box = b;
    return r;
}

/// The pieces used by Lemmas 2-4 for a surface position b of the crystal:
/// L~ = L(c, b - E) and HC~ = HC(b - sum_{dirs} e, dirs) n c.
struct SurfaceSplit {
    SurfacePoint point;
    BoxSet bisected;  ///< L~
    BoxSet remainder; ///< c - L~
    BoxSet cube;      ///< HC~
};

inline SurfaceSplit split_at(const Crystal& c, const Box& b) {
    const auto point = surface_membership(c, b);
    if (!point) throw InvalidArgument("box " + b.str() + " is not a surface position of the crystal");
    SurfaceSplit s;
    s.point = *point;
    s.bisected = bisect(c, b.shifted(-1));
    s.remainder = set_difference(c.boxes(), s.bisected);
    const Box origin = b - Box::from_mask(c.dim(), point->dirs);
    for (const auto& x : hypercube(origin, point->dirs))
        if (c.contains(x)) s.cube.insert(x);
    return s;
}

namespace detail {

inline LemmaReport surface_report(std::string lemma, const Crystal& c, const Box& b, const SurfaceSplit& s,
                                  bool pass, int observed, int expected) {
    auto r = make_report(std::move(lemma), c, pass, std::to_string(observed), std::to_string(expected));
    r.box = b;
    r.d = s.point.d;
    r.dirs = s.point.dirs;
    return r;
}

} // namespace detail

/// omega_c(b) equals omega over (c - L~) + HC~.
inline LemmaReport check_lemma2(const Crystal& c, const Box& b, const Recipe& recipe) {
    const auto s = split_at(c, b);
    const Charge at = charge_of_box(b);
    const int before = omega_set_at(c.boxes(), at, recipe);
    const int after = omega_set_at(set_union(s.remainder, s.cube), at, recipe);
    return detail::surface_report("lemma2", c, b, s, before == after, after, before);
}

/// Clusters straddling HC~ and c - L~ contribute nothing at b.
inline LemmaReport check_lemma3(const Crystal& c, const Box& b, const Recipe& recipe) {
    const auto s = split_at(c, b);
    const int v = omega_cluster_between(s.cube, s.remainder, charge_of_box(b), recipe);
    return detail::surface_report("lemma3", c, b, s, v == 0, v, 0);
}

/// For d < n, c - L~ has zero potential at b.
inline LemmaReport check_lemma4(const Crystal& c, const Box& b, const Recipe& recipe) {
    const auto s = split_at(c, b);
    if (s.point.d >= c.dim()) throw InvalidArgument("lemma 4 needs a surface position with d < n");
    const int v = omega_set_at(s.remainder, charge_of_box(b), recipe);
    return detail::surface_report("lemma4", c, b, s, v == 0, v, 0);
}

/// For an ideal of HC^(d): omega_0 at the top corner is 1 inside G and <= 0
/// outside.
inline LemmaReport check_lemma5(const CubeIdeal& ideal, int n, const Recipe& recipe) {
    const Crystal c = ideal.embed(n);
    const Box t = ideal.top_box(n);
    const bool g = in_G(c, t);
    const int omega = omega_at(c, charge_of_box(t), recipe);
    const bool pass = g ? omega == 1 : omega <= 0;
    auto r = detail::make_report("lemma5", c, pass, "omega=" + std::to_string(omega) + (g ? " in_G" : " not_in_G"),
                                 g ? "omega=1" : "omega<=0");
    r.box = t;
    r.d = ideal.dim();
    for (int k : ideal.dirs()) r.dirs |= DirMask{1} << k;
    return r;
}

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// The hypercube identities for HC^(d) in n dimensions:
///  - alternating binomial sum over the neighbours of the corner equals 1
///    for d < n, and 0 for d = n once truncated at m = n - 1;
///  - omega_0 at the corner is 1 for HC and for HC minus the corner;
///  - omega_0 at E is 1 for the empty partition and for {0}.
inline bool analytic_hc_identity(int d, int n, const Recipe& recipe) {
    if (d < 1 || d > n) throw InvalidArgument("need 1 <= d <= n");
    long long sum = 0;
    const int top = d < n ? d : n - 1;
    for (int m = 1; m <= top; ++m) sum += binomial(d, m) * (m % 2 == 1 ? 1 : -1);
    if (sum != (d < n ? 1 : 0)) return false;

    const CubeIdeal full = CubeIdeal::full(d);
    CubeIdeal cut = full;
    cut.remove(full.top_cell());
    const Charge corner = charge_of_box(full.top_box(n));
    if (omega_at(full.embed(n), corner, recipe) != 1) return false;
    if (omega_at(cut.embed(n), corner, recipe) != 1) return false;

    const Charge e = charge_of_box(Box::ones(n));
    Crystal origin_only(n);
    origin_only.add(Box(n));
    return omega_at(Crystal(n), e, recipe) == 1 && omega_at(origin_only, e, recipe) == 1;
}

/// A random crystal of up to `max_boxes` boxes and one of its surface
/// positions; with `proper_only` the position has some zero component (d < n).
inline std::pair<Crystal, Box> random_surface_instance(int n, std::size_t max_boxes, std::uint64_t seed,
                                                       bool proper_only = false) {
    std::mt19937_64 rng(seed);
    const auto size = std::uniform_int_distribution<std::size_t>(0, max_boxes)(rng);
    Crystal c = grow_random(Crystal(n), size, rng());
    auto points = surface_points(c);
    if (proper_only)
        std::erase_if(points, [n](const Box& b) { return popcount(b.support()) == n; });
    const auto& b = points[std::uniform_int_distribution<std::size_t>(0, points.size() - 1)(rng)];
    return {std::move(c), b};
}

/// A random crystal and a random box in [-1, extent + 1]^n.
inline std::pair<Crystal, Box> random_bisect_instance(int n, std::size_t max_boxes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto size = std::uniform_int_distribution<std::size_t>(0, max_boxes)(rng);
    Crystal c = grow_random(Crystal(n), size, rng());
    std::uniform_int_distribution<int> coord(-1, c.extent() + 1);
    Box b(n);
    for (int k = 0; k < n; ++k) b[k] = coord(rng);
    return {std::move(c), b};
}

} // namespace crystal_charge
