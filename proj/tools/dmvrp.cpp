// Command-line front end: instance generation, per-instance solves,
// metric extraction, the full factorial study, figure rendering and a
// self-contained oracle/invariant selftest.
//
// Exit codes: 0 success, 2 usage error, 3 I/O error, 4 selftest violation.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmvrp/aggregate.hpp"
#include "dmvrp/dp.hpp"
#include "dmvrp/instgen.hpp"
#include "dmvrp/metrics.hpp"
#include "dmvrp/viz.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace dmvrp;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    os << content;
    if (!os) throw IoError("write failed: " + path.string());
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) out.push_back(item);
    return out;
}

std::vector<PolicyId> parse_policies(const std::string& csv) {
    std::vector<PolicyId> out;
    for (const std::string& name : split(csv, ',')) out.push_back(parse_policy(name));
    if (out.empty()) throw std::invalid_argument("policy list must be nonempty");
    return out;
}

std::vector<int> parse_ordinals(const std::string& csv) {
    std::vector<int> out;
    if (csv.empty()) return out;
    for (const std::string& item : split(csv, ',')) out.push_back(std::stoi(item));
    return out;
}

std::string two_digits(int v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

void write_manifest(const fs::path& dir, nlohmann::ordered_json manifest) {
    manifest["tool_version"] = kToolVersion;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Instance load_instance(const std::string& path) {
    try {
        return instance_from_json(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed instance json in " + path + ": " + e.what());
    }
}

int cmd_gen(std::uint64_t root_seed, int instances, const std::string& out) {
    fs::create_directories(out);
    const auto settings = enumerate_settings();
    for (std::size_t ordinal = 0; ordinal < settings.size(); ++ordinal)
        for (int i = 0; i < instances; ++i) {
            const Instance inst = generate_instance(root_seed, settings[ordinal], i);
            write_file(fs::path(out) / ("s" + two_digits(static_cast<int>(ordinal)) + "_i" +
                                        two_digits(i) + ".json"),
                       to_json(inst) + "\n");
        }
    write_manifest(out, {{"format_version", 1},
                         {"command", "gen"},
                         {"root_seed", root_seed},
                         {"instances_per_setting", instances}});
    std::cerr << "wrote " << settings.size() * static_cast<std::size_t>(instances)
              << " instances to " << out << "\n";
    return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& policies_csv,
              const std::string& out) {
    const Instance inst = load_instance(instance_path);
    const TourOracle oracle(inst);
    const auto policies = parse_policies(policies_csv);

    std::vector<ValueTable> tables;
    for (PolicyId policy : policies) {
        switch (policy) {
            case PolicyId::Optimal: {
                const PolicySolution opt = solve_optimal(inst, oracle);
                const RewardDecomposition dec = decompose_optimal(opt, inst, oracle);
                tables.push_back(opt.table);
                tables.push_back(dec.revenue_share);
                tables.push_back(dec.cost_share);
                break;
            }
            case PolicyId::Dpc: tables.push_back(solve_dpc(inst, oracle).table); break;
            case PolicyId::Mcts: tables.push_back(solve_mcts(inst, oracle).table); break;
            case PolicyId::Myopic:
                tables.push_back(evaluate_policy(myopic_rule(inst, oracle), inst, oracle).table);
                break;
        }
    }
    fs::create_directories(out);
    std::ostringstream os;
    std::vector<const ValueTable*> ptrs;
    for (const ValueTable& t : tables) ptrs.push_back(&t);
    write_tables_csv(os, ptrs);
    write_file(fs::path(out) / "tables.csv", os.str());
    write_manifest(out, {{"format_version", 1},
                         {"command", "solve"},
                         {"instance", fs::path(instance_path).filename().string()},
                         {"policies", split(policies_csv, ',')}});
    return 0;
}

int cmd_metrics(const std::string& instance_path, const std::string& policies_csv,
                const std::string& out) {
    const Instance inst = load_instance(instance_path);
    const TourOracle oracle(inst);
    const PolicySolution opt = solve_optimal(inst, oracle);
    const auto policies = parse_policies(policies_csv);

    std::ostringstream os;
    write_metrics_header(os);
    for (PolicyId policy : policies) {
        std::optional<PolicySolution> solution;
        std::optional<DecisionRule> rule;
        switch (policy) {
            case PolicyId::Optimal: rule = as_rule(opt); break;
            case PolicyId::Dpc: solution = solve_dpc(inst, oracle); rule = as_rule(*solution); break;
            case PolicyId::Mcts: solution = solve_mcts(inst, oracle); rule = as_rule(*solution); break;
            case PolicyId::Myopic: rule = myopic_rule(inst, oracle); break;
        }
        const auto records = compute_errors(opt, *rule, inst, oracle);
        write_metrics_rows(os, label(policy), records, inst.horizon());
    }
    fs::create_directories(out);
    write_file(fs::path(out) / "records.csv", os.str());
    write_manifest(out, {{"format_version", 1},
                         {"command", "metrics"},
                         {"instance", fs::path(instance_path).filename().string()},
                         {"policies", split(policies_csv, ',')}});
    return 0;
}

int cmd_study(const StudyConfig& cfg) {
    const StudyReport report = run_study(cfg);
    std::cerr << "study complete: " << report.ordinals.size() << " settings x "
              << cfg.instances_per_setting << " instances";
    for (const auto& [policy, st] : report.stats)
        std::cerr << ", " << label(policy) << " E<0.5 in " << st.underestimation_dominant << "/"
                  << st.settings;
    std::cerr << ", invariant violations " << report.invariant_violations << "\n";
    return 0;
}

// -- plot: re-render figures from a study directory ------------------------

struct SummaryRow {
    int ordinal;
    std::string policy;
    double j_star, j_pi, gap;
    std::string error_ratio;
};

std::vector<SummaryRow> parse_summary(const fs::path& path) {
    std::istringstream is(read_file(path));
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty summary: " + path.string());
    std::vector<SummaryRow> rows;
    while (std::getline(is, line)) {
        const auto cells = split(line, ',');
        if (cells.size() != 11) throw IoError("malformed summary row: " + line);
        rows.push_back(SummaryRow{std::stoi(cells[0]), cells[5], std::stod(cells[6]),
                                  std::stod(cells[7]), std::stod(cells[8]), cells[9]});
    }
    return rows;
}

Heatmap load_heatmap(const fs::path& path, HeatmapMetric metric) {
    Heatmap hm(metric, kStudyHorizon);
    std::istringstream is(read_file(path));
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        const auto cells = split(line, ',');
        if (cells.size() < 5) throw IoError("malformed heatmap row: " + line);
        const int t = std::stoi(cells[0]);
        const int bucket = std::stoi(cells[1]) / 10;
        const long long count = std::stoll(cells[4]);
        const double value = cells[3].empty() ? 0.0 : std::stod(cells[3]);
        const std::size_t cell = hm.cell(t, bucket);
        hm.counts[cell] = count;
        // Stored values are means (or pooled-rate sums); reconstruct sums so
        // Heatmap::value reproduces them under divisor 1.
        hm.sums[cell] = metric == HeatmapMetric::DecisionRate
                            ? value
                            : value * static_cast<double>(count);
    }
    return hm;
}

int cmd_plot(const std::string& study_dir, const std::string& out,
             const std::string& settings_filter, const std::string& policies_filter) {
    const auto rows = parse_summary(fs::path(study_dir) / "summary.csv");
    const auto wanted_settings = parse_ordinals(settings_filter);
    std::vector<std::string> wanted_policies;
    if (!policies_filter.empty()) wanted_policies = split(policies_filter, ',');

    auto keep = [&](const SummaryRow& row) {
        if (!wanted_settings.empty() &&
            std::find(wanted_settings.begin(), wanted_settings.end(), row.ordinal) ==
                wanted_settings.end())
            return false;
        if (!wanted_policies.empty() &&
            std::find(wanted_policies.begin(), wanted_policies.end(), row.policy) ==
                wanted_policies.end())
            return false;
        return true;
    };

    fs::create_directories(out);
    const auto catalogue = enumerate_settings();
    std::vector<SettingSummary> summaries;
    for (const SummaryRow& row : rows) {
        if (!keep(row)) continue;
        SettingSummary sum;
        sum.ordinal = row.ordinal;
        sum.setting = catalogue.at(static_cast<std::size_t>(row.ordinal));
        sum.policy = parse_policy(row.policy);
        sum.mean_j_star = row.j_star;
        sum.mean_j_pi = row.j_pi;
        sum.mean_gap = row.gap;
        if (row.error_ratio != "undefined") {
            sum.regret_over_weighted = std::stod(row.error_ratio);
            sum.regret_total_weighted = 1.0;
        }
        const std::string base = "s" + two_digits(row.ordinal) + "_" + row.policy;
        for (std::size_t k = 0; k < sum.heatmaps.size(); ++k) {
            const auto metric = static_cast<HeatmapMetric>(k);
            sum.heatmaps[k] = load_heatmap(
                fs::path(study_dir) / ("heatmap_" + base + "_" + std::string(label(metric)) + ".csv"),
                metric);
        }
        write_file(fs::path(out) / ("panel_" + base + ".svg"),
                   render_heatmap_panel(sum.setting, row.policy, sum.heatmaps));
        summaries.push_back(std::move(sum));
    }
    write_file(fs::path(out) / "scatter.svg", render_scatter(summaries));
    write_manifest(out, {{"format_version", 1},
                         {"command", "plot"},
                         {"study", study_dir},
                         {"settings_filter", settings_filter},
                         {"policies_filter", policies_filter}});
    std::cerr << "rendered " << summaries.size() << " panels to " << out << "\n";
    return 0;
}

// -- selftest ---------------------------------------------------------------

int selftest_failures = 0;

void selfcheck(bool ok, const std::string& what) {
    std::cout << (ok ? "[ ok ] " : "[FAIL] ") << what << "\n";
    if (!ok) ++selftest_failures;
}

int cmd_selftest() {
    {
        StreamRng rng(808);
        bool exact = true;
        for (int set_index = 0; set_index < 20; ++set_index) {
            std::vector<double> pts;
            for (int i = 0; i < 7; ++i) pts.push_back(rng.next_uniform(kSegmentMin, kSegmentMax));
            for (std::uint32_t mask = 0; mask < (1u << 7); ++mask) {
                std::vector<double> subset;
                for (int i = 0; i < 7; ++i)
                    if ((mask >> i) & 1u) subset.push_back(pts[static_cast<std::size_t>(i)]);
                exact &= optimal_tour_length(subset) == oracle::permutation_tour_length(subset);
            }
        }
        selfcheck(exact, "tour line formula == permutation enumeration (20 sets, all subsets)");
    }
    {
        StreamRng rng(909);
        double max_diff = 0.0;
        for (int variant = 0; variant < 40; ++variant) {
            const Instance inst = oracle::random_instance(rng, 3 + variant % 4, variant);
            const TourOracle oracle(inst);
            max_diff = std::max(max_diff, std::abs(solve_optimal(inst, oracle).root_value -
                                                   oracle::adaptive_optimal_value(inst)));
        }
        selfcheck(max_diff <= 1e-9,
                  "optimal solver == brute-force policy tree (40 instances, max diff " +
                      format_real(max_diff) + ")");
    }
    {
        double max_gap = 0.0;
        for (int ordinal : {4, 21, 60}) {
            const Instance inst = generate_instance(42, enumerate_settings()[static_cast<std::size_t>(ordinal)], 0);
            const TourOracle oracle(inst);
            const PolicySolution opt = solve_optimal(inst, oracle);
            const RewardDecomposition dec = decompose_optimal(opt, inst, oracle);
            for (int t = 0; t <= inst.horizon(); ++t)
                for (OrderSet s : opt.table.states(t))
                    max_gap = std::max(max_gap, std::abs(opt.table.at(t, s) - dec.revenue_share.at(t, s) -
                                                         dec.cost_share.at(t, s)));
        }
        selfcheck(max_gap <= 1e-9, "reward decomposition identity (max gap " + format_real(max_gap) + ")");
    }
    {
        StudyConfig cfg;
        cfg.instances_per_setting = 5;
        cfg.setting_filter = {5, 28, 47};
        const StudyReport report = run_study(cfg);
        selfcheck(report.invariant_violations == 0 && report.incomplete_settings.empty(),
                  "study invariant smoke (3 settings x 5 instances, violations " +
                      std::to_string(report.invariant_violations) + ")");
    }
    {
        const RateFidelityResult res = rate_fidelity_check(42, 3, 20000, 17);
        selfcheck(res.pass, "sampled-vs-exact decision rates (max z " + format_real(res.max_z) + ")");
    }
    if (selftest_failures > 0) {
        std::cout << selftest_failures << " selftest check(s) failed\n";
        return 4;
    }
    std::cout << "all selftest checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact demand-management and vehicle-routing laboratory"};
    app.require_subcommand(1);

    std::uint64_t root_seed = 42;
    int instances = 50;
    int workers = 0;
    long long sample_paths = 0;
    std::string out_dir;
    std::string instance_path;
    std::string policies_csv = "dpc,mcts,myopic";
    std::string study_dir;
    std::string settings_filter;
    std::string policies_filter;
    bool skip_invariants = false;

    auto* gen = app.add_subcommand("gen", "generate the 66 x N instance files");
    gen->add_option("--root-seed", root_seed, "study root seed")->envname("DMVRPX_ROOT_SEED");
    gen->add_option("--instances", instances, "instances per setting")->envname("DMVRPX_INSTANCES");
    gen->add_option("--out", out_dir, "output directory")->required()->envname("DMVRPX_OUT");

    auto* solve = app.add_subcommand("solve", "dump per-instance value tables");
    solve->add_option("--instance", instance_path, "instance json file")->required();
    solve->add_option("--policies", policies_csv, "comma list: optimal,dpc,mcts,myopic");
    solve->add_option("--out", out_dir, "output directory")->required();

    auto* metrics = app.add_subcommand("metrics", "emit the per-instance metric records");
    metrics->add_option("--instance", instance_path, "instance json file")->required();
    metrics->add_option("--policies", policies_csv, "comma list: optimal,dpc,mcts,myopic");
    metrics->add_option("--out", out_dir, "output directory")->required();

    auto* study = app.add_subcommand("study", "run the full factorial study");
    study->add_option("--root-seed", root_seed, "study root seed")->envname("DMVRPX_ROOT_SEED");
    study->add_option("--instances", instances, "instances per setting")->envname("DMVRPX_INSTANCES");
    study->add_option("--policies", policies_csv, "comma list: optimal,dpc,mcts,myopic")
        ->envname("DMVRPX_POLICIES");
    study->add_option("--out", out_dir, "output directory")->required()->envname("DMVRPX_OUT");
    study->add_option("--workers", workers, "worker threads (0 = hardware)")->envname("DMVRPX_WORKERS");
    study->add_option("--sample-paths", sample_paths, "Monte-Carlo paths for the rate fidelity mode")
        ->envname("DMVRPX_SAMPLE_PATHS");
    study->add_flag("--skip-invariants", skip_invariants, "skip the inline invariant checks");

    auto* plot = app.add_subcommand("plot", "render SVG figures from study artifacts");
    plot->add_option("--study", study_dir, "study output directory")->required();
    plot->add_option("--out", out_dir, "figure output directory")->required();
    plot->add_option("--settings", settings_filter, "comma list of setting ordinals");
    plot->add_option("--policies", policies_filter, "comma list of policies");

    app.add_subcommand("selftest", "run the oracle and invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand("gen")) return cmd_gen(root_seed, instances, out_dir);
        if (app.got_subcommand("solve")) return cmd_solve(instance_path, policies_csv, out_dir);
        if (app.got_subcommand("metrics")) return cmd_metrics(instance_path, policies_csv, out_dir);
        if (app.got_subcommand("study")) {
            StudyConfig cfg;
            cfg.root_seed = root_seed;
            cfg.instances_per_setting = instances;
            cfg.policies = parse_policies(policies_csv);
            cfg.out_dir = out_dir;
            cfg.workers = workers;
            cfg.sample_paths = sample_paths;
            cfg.check_invariants = !skip_invariants;
            return cmd_study(cfg);
        }
        if (app.got_subcommand("plot"))
            return cmd_plot(study_dir, out_dir, settings_filter, policies_filter);
        if (app.got_subcommand("selftest")) return cmd_selftest();
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
