// crystal-charge: verification front end for charge functions of
// n-dimensional partitions.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 usage or config error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "crystal_charge/crystal_charge.hpp"
#include "crystal_charge/io.hpp"

namespace cc = crystal_charge;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct RunConfig {
    int n = 5;
    bool n_given = false;
    int d = 0;
    std::size_t boxes = 200;
    std::size_t max_boxes = 30; ///< lemma instances
    std::size_t seeds = 100;
    std::uint64_t seed = 0;
    std::size_t samples = 10000;
    std::string strategy = "grow_to";
    int workers = 0;
    std::string in;
    std::string out;
    std::string save_partition;
    bool exhaustive = false;
    bool probe = false;
    int lemma = 0;
    std::string figure;
};

/// Writes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw cc::InvalidArgument("cannot write " + path);
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }
    bool to_stdout() const { return !file_; }

private:
    std::unique_ptr<std::ofstream> file_;
};

/// Partition files carry their own dimension; --n only constrains it when given.
cc::Crystal load_input(const RunConfig& cfg) {
    return cc::load_partition(cfg.in, cfg.n_given ? std::optional<int>(cfg.n) : std::nullopt);
}

int workers_of(const RunConfig& cfg) { return cc::worker_count(cfg.workers > 0 ? std::optional<int>(cfg.workers) : std::nullopt); }

std::vector<cc::Crystal> crystals_for(const RunConfig& cfg) {
    if (!cfg.in.empty()) return {load_input(cfg)};
    auto grown = cc::parallel_map(cfg.seeds, workers_of(cfg), [&](std::size_t i) {
        return cc::grow_random(cc::Crystal(cfg.n), cfg.boxes, cc::derive_seed(cfg.seed, i));
    });
    return grown;
}

int cmd_verify(const RunConfig& cfg) {
    const auto crystals = crystals_for(cfg);
    const cc::Recipe recipe = cc::recipe_for(crystals.empty() ? cfg.n : crystals.front().dim());
    struct Outcome {
        std::vector<cc::LemmaReport> reports;
    };
    auto outcomes = cc::parallel_map(crystals.size(), workers_of(cfg), [&](std::size_t i) {
        Outcome o;
        const auto& c = crystals[i];
        auto conj = cc::check_conjecture(c, recipe);
        const bool oracle_ok = cc::potential(c, recipe) == cc::factor_multiset_oracle(c, recipe);
        auto oracle = conj;
        oracle.lemma = "oracle";
        oracle.pass = oracle_ok;
        oracle.observed = oracle_ok ? "equal" : "different";
        oracle.expected = "equal";
        if (oracle_ok) oracle.replay_boxes.clear();
        else oracle.replay_boxes = c.sorted_boxes();
        if (cfg.in.empty()) conj.seed = oracle.seed = cc::derive_seed(cfg.seed, i);
        o.reports.push_back(std::move(conj));
        o.reports.push_back(std::move(oracle));
        if (cfg.probe) {
            const cc::ResidueProbe probe(c, recipe, cc::probe_weights(c));
            int mismatches = 0;
            const auto spectrum = cc::potential(c, recipe);
            for (const auto& [charge, order] : spectrum.entries())
                if (probe.order_at(charge) != order) ++mismatches;
            auto r = o.reports.front();
            r.lemma = "residue_probe";
            r.pass = mismatches == 0;
            r.observed = std::to_string(mismatches) + " mismatches";
            r.expected = "0 mismatches";
            if (r.pass) r.replay_boxes.clear();
            else r.replay_boxes = c.sorted_boxes();
            o.reports.push_back(std::move(r));
        }
        return o;
    });
    std::size_t failures = 0;
    std::unique_ptr<Sink> sink;
    if (!cfg.out.empty()) sink = std::make_unique<Sink>(cfg.out);
    for (const auto& o : outcomes)
        for (const auto& r : o.reports) {
            failures += r.pass ? 0 : 1;
            if (sink) sink->os() << cc::report_to_json(r).dump() << '\n';
        }
    std::cout << "verify n=" << recipe.n << ": " << crystals.size() << " crystals, " << failures << " violations\n";
    return failures == 0 ? kOk : kViolation;
}

int lemma5_run(const RunConfig& cfg, bool exhaustive) {
    const int lo = cfg.d > 0 ? cfg.d : 1;
    const int hi = cfg.d > 0 ? cfg.d : cfg.n;
    if (hi > cfg.n) throw cc::InvalidArgument("d must not exceed n");
    if (exhaustive && hi > 5) throw cc::InvalidArgument("exhaustive mode supports d <= 5; use --samples");
    const auto strategy = cc::parse_strategy(cfg.strategy);
    std::uint64_t violations = 0, mismatches = 0;
    std::unique_ptr<Sink> sink;
    if (!cfg.out.empty()) {
        sink = std::make_unique<Sink>(cfg.out);
        sink->os() << "d,box_count,pole_order,count,in_G_count\n";
    }
    for (int d = lo; d <= hi; ++d) {
        const std::size_t strata = (std::size_t{1} << d) + 1;
        const std::size_t per_stratum = (cfg.samples + strata - 1) / strata;
        const auto h = cc::stratified_scan(d, cfg.n, per_stratum, cc::derive_seed(cfg.seed, static_cast<std::uint64_t>(d)),
                                           workers_of(cfg), strategy, exhaustive);
        violations += h.violations;
        mismatches += h.shortcut_mismatches;
        std::cout << "d=" << d << " n=" << cfg.n << " ideals=" << h.total << (h.exhaustive ? " (exhaustive)" : " (sampled)")
                  << " violations=" << h.violations << " shortcut_mismatches=" << h.shortcut_mismatches << '\n';
        if (sink)
            for (const auto& [key, bin] : h.bins)
                sink->os() << d << ',' << key.first << ',' << key.second << ',' << bin.count << ',' << bin.in_G << '\n';
    }
    std::cout << "total violations=" << violations << " shortcut_mismatches=" << mismatches << '\n';
    return violations == 0 && mismatches == 0 ? kOk : kViolation;
}

int cmd_lemma5(const RunConfig& cfg) {
    if (cfg.n % 2 == 0) throw cc::UnsupportedDimension("lemma 5 is stated for odd n");
    return lemma5_run(cfg, cfg.exhaustive || cfg.n == 5);
}

int cmd_lemma(const RunConfig& cfg) {
    if (cfg.lemma == 5) return cmd_lemma5(cfg);
    if (cfg.lemma < 1 || cfg.lemma > 4) throw cc::InvalidArgument("lemma must be 1..5");
    const cc::Recipe recipe = cc::recipe_for(cfg.n);
    auto reports = cc::parallel_map(cfg.samples, workers_of(cfg), [&](std::size_t i) {
        const std::uint64_t s = cc::derive_seed(cfg.seed, i);
        cc::LemmaReport r;
        if (cfg.lemma == 1) {
            auto [c, b] = cc::random_bisect_instance(cfg.n, cfg.max_boxes, s);
            r = cc::check_lemma1(c, b);
        } else {
            auto [c, b] = cc::random_surface_instance(cfg.n, cfg.max_boxes, s, cfg.lemma == 4);
            r = cfg.lemma == 2 ? cc::check_lemma2(c, b, recipe)
                : cfg.lemma == 3 ? cc::check_lemma3(c, b, recipe)
                                 : cc::check_lemma4(c, b, recipe);
        }
        r.seed = s;
        return r;
    });
    std::size_t failures = 0;
    std::unique_ptr<Sink> sink;
    if (!cfg.out.empty()) sink = std::make_unique<Sink>(cfg.out);
    for (const auto& r : reports) {
        failures += r.pass ? 0 : 1;
        if (sink) sink->os() << cc::report_to_json(r).dump() << '\n';
    }
    std::cout << "lemma" << cfg.lemma << " n=" << cfg.n << ": " << reports.size() << " instances, " << failures
              << " violations\n";
    return failures == 0 ? kOk : kViolation;
}

int cmd_enumerate(const RunConfig& cfg) {
    const int hi = cfg.d > 0 ? cfg.d : 5;
    std::unique_ptr<Sink> sink;
    if (!cfg.out.empty()) {
        sink = std::make_unique<Sink>(cfg.out);
        sink->os() << "d,box_count,count\n";
    }
    for (int d = 1; d <= hi; ++d) {
        std::vector<std::uint64_t> per_size((std::size_t{1} << d) + 1, 0);
        std::uint64_t total = 0;
        cc::for_each_ideal(d, [&](const cc::CubeIdeal& ideal) {
            ++per_size[ideal.size()];
            ++total;
        });
        std::size_t mode = 0;
        for (std::size_t k = 0; k < per_size.size(); ++k)
            if (per_size[k] > per_size[mode]) mode = k;
        std::cout << "d=" << d << " ideals=" << total << " most_common_box_count=" << mode << '\n';
        if (sink)
            for (std::size_t k = 0; k < per_size.size(); ++k) sink->os() << d << ',' << k << ',' << per_size[k] << '\n';
    }
    return kOk;
}

int cmd_figure_data(const RunConfig& cfg) {
    if (cfg.figure == "bubbles") {
        if (cfg.d < 1) throw cc::InvalidArgument("bubbles needs --d");
        const std::size_t strata = (std::size_t{1} << cfg.d) + 1;
        const auto h = cc::stratified_scan(cfg.d, cfg.n, (cfg.samples + strata - 1) / strata, cfg.seed, workers_of(cfg),
                                           cc::parse_strategy(cfg.strategy));
        Sink sink(cfg.out);
        h.write_csv(sink.os());
        if (!sink.to_stdout())
            std::cout << "d=" << cfg.d << " n=" << cfg.n << " ideals=" << h.total << " violations=" << h.violations << '\n';
        return h.violations == 0 && h.shortcut_mismatches == 0 ? kOk : kViolation;
    }
    if (cfg.figure == "projection") {
        const cc::Crystal c = cfg.in.empty() ? cc::grow_random(cc::Crystal(cfg.n), cfg.boxes, cfg.seed)
                                             : load_input(cfg);
        const cc::Recipe recipe = cc::recipe_for(c.dim());
        const auto data = cc::projection_data(c, recipe);
        Sink sink(cfg.out);
        sink.os() << data.dump(1) << '\n';
        if (!sink.to_stdout())
            std::cout << "boxes=" << c.size() << " markers=" << data["marker_count"]
                      << " simple_poles=" << data["simple_pole_count"]
                      << " equal=" << (data["markers_equal_poles"].get<bool>() ? "yes" : "no") << '\n';
        return data["markers_equal_poles"].get<bool>() ? kOk : kViolation;
    }
    throw cc::InvalidArgument("figure-data needs 'bubbles' or 'projection'");
}

int cmd_project(const RunConfig& cfg) {
    const cc::Crystal c = cfg.in.empty() ? cc::grow_random(cc::Crystal(cfg.n), cfg.boxes, cfg.seed)
                                         : load_input(cfg);
    const cc::Recipe recipe = cc::recipe_for(c.dim());
    if (!cfg.save_partition.empty()) cc::save_partition(c, cfg.save_partition);
    const auto spectrum = cc::potential(c, recipe);
    const auto report = cc::check_conjecture(c, recipe);
    cc::json out = {{"n", c.dim()},
                    {"partition", cc::partition_to_json(c)},
                    {"spectrum", cc::spectrum_to_json(spectrum)},
                    {"targets", cc::charges_to_json(cc::targets(c))},
                    {"simple_poles", cc::charges_to_json(spectrum.charges_with_order(1))},
                    {"conjecture_holds", report.pass}};
    Sink sink(cfg.out);
    sink.os() << out.dump(1) << '\n';
    return report.pass ? kOk : kViolation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification engine for charge functions of n-dimensional partitions"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "ambient dimension")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "base random seed")->capture_default_str();
        sub->add_option("--workers", cfg.workers, "worker threads (env CRYSTAL_CHARGE_WORKERS overrides)");
        sub->add_option("--out", cfg.out, "output file");
    };

    auto* verify = app.add_subcommand("verify", "grow or load crystals and check the pole/target conjecture");
    common(verify);
    verify->add_option("--boxes", cfg.boxes, "boxes per grown crystal")->capture_default_str();
    verify->add_option("--seeds", cfg.seeds, "number of grown crystals")->capture_default_str();
    verify->add_option("--in", cfg.in, "partition JSON file instead of grown crystals");
    verify->add_flag("--probe", cfg.probe, "also confirm every pole order numerically");

    auto* lemma = app.add_subcommand("lemma", "random-instance check of lemma 1-5");
    common(lemma);
    lemma->add_option("which", cfg.lemma, "lemma number 1..5")->required()->check(CLI::Range(1, 5));
    lemma->add_option("--samples", cfg.samples = 1000, "instances (lemma 5: ideals per d)")->capture_default_str();
    lemma->add_option("--boxes", cfg.max_boxes, "maximum crystal size for random instances")->capture_default_str();
    lemma->add_option("--d", cfg.d, "single cube dimension (lemma 5)");
    lemma->add_option("--strategy", cfg.strategy, "ideal sampler: grow_to, closure, walk");
    lemma->add_flag("--exhaustive", cfg.exhaustive, "enumerate every ideal (lemma 5, d <= 5)");

    auto* enumerate = app.add_subcommand("enumerate", "enumerate all ideals of HC^(d) for d = 1..D");
    enumerate->add_option("--d", cfg.d, "largest cube dimension (<= 6)");
    enumerate->add_option("--out", cfg.out, "CSV of counts per box count");

    auto* lemma5 = app.add_subcommand("lemma5", "check lemma 5 on every cube dimension d = 1..n");
    common(lemma5);
    lemma5->add_option("--d", cfg.d, "single cube dimension");
    lemma5->add_option("--samples", cfg.samples, "sampled ideals per d")->capture_default_str();
    lemma5->add_option("--strategy", cfg.strategy, "ideal sampler: grow_to, closure, walk")->capture_default_str();
    lemma5->add_flag("--exhaustive", cfg.exhaustive, "enumerate every ideal (d <= 5)");

    auto* figure = app.add_subcommand("figure-data", "emit plotting data: bubbles (CSV) or projection (JSON)");
    common(figure);
    figure->add_option("kind", cfg.figure, "bubbles | projection")->required();
    figure->add_option("--d", cfg.d, "cube dimension (bubbles)");
    figure->add_option("--samples", cfg.samples, "sampled ideals for d > 5 (bubbles)");
    figure->add_option("--strategy", cfg.strategy, "ideal sampler (bubbles)");
    figure->add_option("--boxes", cfg.boxes, "boxes of the grown crystal (projection)");
    figure->add_option("--in", cfg.in, "partition JSON file (projection)");

    auto* project = app.add_subcommand("project", "pole spectrum and targets of one partition");
    common(project);
    project->add_option("--in", cfg.in, "partition JSON file");
    project->add_option("--boxes", cfg.boxes, "boxes of the grown crystal when --in is absent");
    project->add_option("--save-partition", cfg.save_partition, "write the partition used to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    for (auto* sub : app.get_subcommands())
        if (const auto* opt = sub->get_option_no_throw("--n"); opt && opt->count() > 0) cfg.n_given = true;

    try {
        if (*verify) return cmd_verify(cfg);
        if (*lemma) return cmd_lemma(cfg);
        if (*enumerate) return cmd_enumerate(cfg);
        if (*lemma5) return cmd_lemma5(cfg);
        if (*figure) return cmd_figure_data(cfg);
        if (*project) return cmd_project(cfg);
    } catch (const cc::UnsupportedDimension& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const cc::InvalidPartition& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const cc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
