#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "charge_engine.hpp"
#include "cube_ideal.hpp"
#include "lemma_suite.hpp"
#include "parallel.hpp"

namespace crystal_charge {

/// Counts of cube ideals per (box count, pole order at the top corner).
struct StratumHistogram {
    struct Bin {
        std::uint64_t count = 0;
        std::uint64_t in_G = 0;
        friend bool operator==(const Bin&, const Bin&) = default;
    };

    int d = 0;
    int n = 0;
    bool exhaustive = false;
    std::map<std::pair<std::size_t, int>, Bin> bins;
    std::uint64_t total = 0;
    std::uint64_t violations = 0;         ///< Lemma 5 failures
    std::uint64_t shortcut_mismatches = 0; ///< closed-form G list disagreeing with in_G

    void record(std::size_t boxes, int order, bool g, bool violation, bool shortcut_ok) {
        auto& bin = bins[{boxes, order}];
        ++bin.count;
        bin.in_G += g ? 1 : 0;
        ++total;
        violations += violation ? 1 : 0;
        shortcut_mismatches += shortcut_ok ? 0 : 1;
    }

    StratumHistogram& merge(const StratumHistogram& o) {
        for (const auto& [key, bin] : o.bins) {
            bins[key].count += bin.count;
            bins[key].in_G += bin.in_G;
        }
        total += o.total;
        violations += o.violations;
        shortcut_mismatches += o.shortcut_mismatches;
        return *this;
    }

    /// Box counts at which the given pole order occurs.
    std::vector<std::size_t> box_counts_with_order(int order) const {
        std::vector<std::size_t> out;
        for (const auto& [key, bin] : bins)
            if (key.second == order && bin.count > 0) out.push_back(key.first);
        return out;
    }

    /// Ideals per box count, indexed 0..2^d.
    std::vector<std::uint64_t> per_box_count() const {
        std::vector<std::uint64_t> out((std::size_t{1} << d) + 1, 0);
        for (const auto& [key, bin] : bins) out[key.first] += bin.count;
        return out;
    }

    /// CSV with columns box_count,pole_order,count,in_G_count.
    void write_csv(std::ostream& os) const {
        os << "box_count,pole_order,count,in_G_count\n";
        for (const auto& [key, bin] : bins) os << key.first << ',' << key.second << ',' << bin.count << ',' << bin.in_G << '\n';
    }

    std::string csv() const {
        std::ostringstream os;
        write_csv(os);
        return os.str();
    }
};

namespace detail {

inline void scan_one(StratumHistogram& h, const CubeIdeal& ideal, int n, const Recipe& recipe) {
    const Crystal c = ideal.embed(n);
    const Box t = ideal.top_box(n);
    const bool g = in_G(c, t);
    const int omega = omega_at(c, charge_of_box(t), recipe);
    const bool violation = g ? omega != 1 : omega > 0;
    h.record(ideal.size(), omega, g, violation, hypercube_G_shortcut(ideal, n) == g);
}

} // namespace detail

/// Pole order at the top corner of every ideal of HC^(d) in n dimensions,
/// stratified by box count. Cubes with d <= 5 are enumerated exhaustively
/// unless `allow_exhaustive` is false; otherwise `samples_per_stratum` ideals
/// are drawn for each box count 0..2^d, stratum k seeded with
/// derive_seed(seed, k).
inline StratumHistogram stratified_scan(int d, int n, std::size_t samples_per_stratum, std::uint64_t seed,
                                        int workers = 1, SampleStrategy strategy = SampleStrategy::grow_to,
                                        bool allow_exhaustive = true) {
    if (d < 1 || d > n) throw InvalidArgument("need 1 <= d <= n");
    if (d > kMaxCubeDim) throw InvalidArgument("cube dimension above " + std::to_string(kMaxCubeDim));
    const Recipe recipe = recipe_for(n);
    StratumHistogram h;
    h.d = d;
    h.n = n;
    if (allow_exhaustive && d <= 5) {
        h.exhaustive = true;
        for_each_ideal(d, [&](const CubeIdeal& ideal) { detail::scan_one(h, ideal, n, recipe); });
        return h;
    }
    const std::size_t strata = (std::size_t{1} << d) + 1;
    auto parts = parallel_map(strata, workers, [&](std::size_t k) {
        StratumHistogram part;
        part.d = d;
        part.n = n;
        const std::uint64_t stratum_seed = derive_seed(seed, k);
        for (std::size_t i = 0; i < samples_per_stratum; ++i) {
            const auto ideal = sample_ideal(d, {strategy, k}, derive_seed(stratum_seed, i));
            detail::scan_one(part, ideal, n, recipe);
        }
        return part;
    });
    for (const auto& p : parts) h.merge(p);
    return h;
}

} // namespace crystal_charge
