// Acceptance gate: one PASS/FAIL line per criterion. Tolerances and time
// limits are fixed here; the exit status is nonzero if any criterion fails.

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "crystal_charge/crystal_charge.hpp"

namespace cc = crystal_charge;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds; // 0: no limit
    std::function<Outcome()> run;
};

int workers() { return cc::worker_count(); }

std::size_t per_stratum(std::size_t per_d, int d) {
    const std::size_t strata = (std::size_t{1} << d) + 1;
    return (per_d + strata - 1) / strata;
}

/// Conjecture check over `count` grown crystals, sizes drawn from [lo, hi].
Outcome conjecture_sweep(int n, std::size_t count, std::size_t lo, std::size_t hi, std::uint64_t seed) {
    const cc::Recipe recipe = cc::recipe_for(n);
    const auto results = cc::parallel_map(count, workers(), [&](std::size_t i) {
        const std::uint64_t s = cc::derive_seed(seed, i);
        const std::size_t size = lo + s % (hi - lo + 1);
        return cc::check_conjecture(cc::grow_random(cc::Crystal(n), size, s), recipe).pass;
    });
    std::size_t bad = 0;
    for (bool p : results) bad += p ? 0 : 1;
    return {bad == 0, "n=" + std::to_string(n) + " crystals=" + std::to_string(count) + " violations=" +
                          std::to_string(bad)};
}

Outcome merge(std::vector<Outcome> parts) {
    Outcome o;
    for (auto& p : parts) {
        o.ok = o.ok && p.ok;
        o.detail += (o.detail.empty() ? "" : "; ") + p.detail;
    }
    return o;
}

Outcome dedekind() {
    const std::vector<std::uint64_t> expected{3, 6, 20, 168, 7581};
    Outcome o;
    for (int d = 1; d <= 5; ++d) {
        const auto got = cc::count_ideals(d);
        o.ok = o.ok && got == expected[static_cast<std::size_t>(d - 1)];
        o.detail += (d > 1 ? "/" : "M=") + std::to_string(got);
    }
    return o;
}

Outcome lemma5_exhaustive() {
    const cc::Recipe recipe = cc::recipe_for(5);
    std::uint64_t total = 0, bad = 0, shortcut = 0;
    for (int d = 1; d <= 5; ++d)
        cc::for_each_ideal(d, [&](const cc::CubeIdeal& ideal) {
            ++total;
            bad += cc::check_lemma5(ideal, 5, recipe).pass ? 0 : 1;
            shortcut += cc::shortcut_agrees(ideal, 5) ? 0 : 1;
        });
    return {total == 7778 && bad == 0 && shortcut == 0,
            "ideals=" + std::to_string(total) + " violations=" + std::to_string(bad) +
                " shortcut_mismatches=" + std::to_string(shortcut)};
}

std::string list(const std::vector<std::size_t>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
}

Outcome figure4_strata() {
    const auto d4 = cc::stratified_scan(4, 5, 0, 0).box_counts_with_order(1);
    const auto d5 = cc::stratified_scan(5, 5, 0, 0).box_counts_with_order(1);
    const bool ok = d4 == std::vector<std::size_t>{15, 16} && d5 == std::vector<std::size_t>{0, 1, 31, 32};
    return {ok, "d=4 " + list(d4) + " d=5 " + list(d5)};
}

Outcome hypercube_identity() {
    Outcome o;
    for (int n : {5, 7}) {
        const cc::Recipe recipe = cc::recipe_for(n);
        int good = 0;
        for (int d = 1; d <= n; ++d) {
            const auto cube = cc::CubeIdeal::full(d);
            const int w = cc::omega_at(cube.embed(n), cc::charge_of_box(cube.top_box(n)), recipe);
            if (w == 1 && cc::analytic_hc_identity(d, n, recipe)) ++good;
        }
        o.ok = o.ok && good == n;
        o.detail += (o.detail.empty() ? "" : " ") + ("n=" + std::to_string(n) + ":" + std::to_string(good) + "/" +
                                                      std::to_string(n));
    }
    return o;
}

Outcome oracle_equivalence() {
    std::vector<Outcome> parts;
    for (int n : {3, 5, 7}) {
        const cc::Recipe recipe = cc::recipe_for(n);
        struct R {
            bool oracle;
            std::size_t probed, probe_bad;
        };
        const auto rs = cc::parallel_map(1000, workers(), [&](std::size_t i) {
            const std::uint64_t s = cc::derive_seed(8000 + static_cast<std::uint64_t>(n), i);
            const cc::Crystal c = cc::grow_random(cc::Crystal(n), s % 61, s);
            const auto spectrum = cc::potential(c, recipe);
            R r{cc::factor_multiset_oracle(c, recipe) == spectrum, 0, 0};
            if (i < 100) {
                const cc::ResidueProbe probe(c, recipe, cc::probe_weights(c));
                for (const auto& [charge, order] : spectrum.entries()) {
                    ++r.probed;
                    r.probe_bad += probe.order_at(charge) == cc::omega_at(c, charge, recipe) ? 0 : 1;
                }
            }
            return r;
        });
        std::size_t oracle_bad = 0, probed = 0, probe_bad = 0;
        for (const auto& r : rs) {
            oracle_bad += r.oracle ? 0 : 1;
            probed += r.probed;
            probe_bad += r.probe_bad;
        }
        parts.push_back({oracle_bad == 0 && probe_bad == 0,
                         "n=" + std::to_string(n) + " oracle_mismatch=" + std::to_string(oracle_bad) + "/1000 probe_mismatch=" +
                             std::to_string(probe_bad) + "/" + std::to_string(probed)});
    }
    return merge(std::move(parts));
}

Outcome lemma_suites() {
    constexpr std::size_t kInstances = 10000;
    std::vector<Outcome> parts;
    for (int n : {5, 7}) {
        const cc::Recipe recipe = cc::recipe_for(n);
        const std::size_t max_boxes = n == 5 ? 40 : 30;
        const auto rs = cc::parallel_map(kInstances, workers(), [&](std::size_t i) {
            const std::uint64_t s = cc::derive_seed(900 + static_cast<std::uint64_t>(n), i);
            std::array<bool, 4> ok{};
            {
                auto [c, b] = cc::random_bisect_instance(n, max_boxes, s);
                ok[0] = cc::check_lemma1(c, b).pass;
            }
            {
                auto [c, b] = cc::random_surface_instance(n, max_boxes, s);
                ok[1] = cc::check_lemma2(c, b, recipe).pass;
                ok[2] = cc::check_lemma3(c, b, recipe).pass;
            }
            {
                auto [c, b] = cc::random_surface_instance(n, max_boxes, s, true);
                ok[3] = cc::check_lemma4(c, b, recipe).pass;
            }
            return ok;
        });
        std::array<std::size_t, 4> bad{};
        for (const auto& r : rs)
            for (std::size_t k = 0; k < 4; ++k) bad[k] += r[k] ? 0 : 1;
        std::string d = "n=" + std::to_string(n) + " x" + std::to_string(kInstances) + " violations";
        bool ok = true;
        for (std::size_t k = 0; k < 4; ++k) {
            d += " L" + std::to_string(k + 1) + "=" + std::to_string(bad[k]);
            ok = ok && bad[k] == 0;
        }
        parts.push_back({ok, d});
    }
    return merge(std::move(parts));
}

Outcome monte_carlo() {
    std::vector<Outcome> parts;
    for (auto [n, per_d] : {std::pair{7, std::size_t{10000}}, std::pair{9, std::size_t{1000}}}) {
        std::uint64_t total = 0, bad = 0, shortcut = 0;
        for (int d = 1; d <= n; ++d) {
            const auto h = cc::stratified_scan(d, n, per_stratum(per_d, d), cc::derive_seed(77, static_cast<std::uint64_t>(d)),
                                               workers(), cc::SampleStrategy::grow_to, false);
            total += h.total;
            bad += h.violations;
            shortcut += h.shortcut_mismatches;
        }
        parts.push_back({bad == 0 && shortcut == 0, "n=" + std::to_string(n) + " sampled=" + std::to_string(total) +
                                                        " violations=" + std::to_string(bad) +
                                                        " shortcut_mismatches=" + std::to_string(shortcut)});
    }
    return merge(std::move(parts));
}

} // namespace

int main(int argc, char** argv) {
    // --criterion N runs a single criterion
    int only = 0;
    if (argc == 3 && std::string(argv[1]) == "--criterion") only = std::atoi(argv[2]);
    else if (argc != 1) {
        std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
        return 2;
    }

    const std::vector<Criterion> criteria{
        {1, "Dedekind counts d=1..5", 10, dedekind},
        {2, "Lemma 5 exhaustive, n=5, all 7778 ideals", 60, lemma5_exhaustive},
        {3, "pole-order-1 strata for d=4,5 (n=5)", 0, figure4_strata},
        {4, "hypercube corner identity, n=5,7", 10, hypercube_identity},
        {5, "conjecture on 100 n=5 (200 boxes) + 100 n=7 (80 boxes)", 300,
         [] { return merge({conjecture_sweep(5, 100, 200, 200, 5), conjecture_sweep(7, 100, 80, 80, 7)}); }},
        {6, "3D regression, 100 plane partitions <= 150 boxes", 0, [] { return conjecture_sweep(3, 100, 1, 150, 3); }},
        {7, "4D regression, 50 solid partitions <= 60 boxes", 0, [] { return conjecture_sweep(4, 50, 1, 60, 4); }},
        {8, "factor oracle on 3x1000 crystals, residue probe on 3x100", 0, oracle_equivalence},
        {9, "Lemmas 1-4 on 10^4 instances, n=5,7", 0, lemma_suites},
        {10, "Lemma 5 Monte Carlo, n=7 (10^4/d) and n=9 (10^3/d)", 1800, monte_carlo},
    };
    int failures = 0, ran = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string timing = std::to_string(secs);
        timing.resize(timing.find('.') + 3);
        if (c.limit_seconds > 0 && secs > c.limit_seconds) {
            o.ok = false;
            o.detail += " (time limit " + std::to_string(static_cast<int>(c.limit_seconds)) + "s exceeded)";
        }
        failures += o.ok ? 0 : 1;
        std::printf("[%s] criterion %2d: %s | %s | %ss\n", o.ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), timing.c_str());
        std::fflush(stdout);
    }
    if (ran == 0) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
