#include "dmvrp/aggregate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "dmvrp/dp.hpp"
#include "dmvrp/instgen.hpp"
#include "dmvrp/viz.hpp"

namespace dmvrp {

double capacity_pct(OrderSet state, const Instance& inst, const TourOracle& oracle) {
    switch (inst.setting.cons) {
        case ConstraintType::Load:
            return 100.0 * state.size() / inst.setting.load_capacity();
        case ConstraintType::Dist:
            return 100.0 * oracle.length(state) / inst.setting.route_limit();
    }
    throw std::logic_error("bad ConstraintType");
}

std::string_view label(HeatmapMetric m) {
    switch (m) {
        case HeatmapMetric::EOver: return "e_over";
        case HeatmapMetric::EUnder: return "e_under";
        case HeatmapMetric::RegretOver: return "regret_over";
        case HeatmapMetric::RegretUnder: return "regret_under";
        case HeatmapMetric::DecisionRate: return "rate";
    }
    throw std::logic_error("bad HeatmapMetric");
}

int capacity_bucket(double pct) {
    int b = static_cast<int>(pct / 10.0);
    return std::clamp(b, 0, kCapacityBuckets - 1);
}

Heatmap::Heatmap(HeatmapMetric m, int T) : metric(m), horizon(T) {
    sums.assign(static_cast<std::size_t>(T) * kCapacityBuckets, 0.0);
    counts.assign(static_cast<std::size_t>(T) * kCapacityBuckets, 0);
}

std::size_t Heatmap::cell(int epoch, int bucket) const {
    return static_cast<std::size_t>(epoch - 1) * kCapacityBuckets + static_cast<std::size_t>(bucket);
}

void Heatmap::add(int epoch, int bucket, double value) {
    sums[cell(epoch, bucket)] += value;
    counts[cell(epoch, bucket)] += 1;
}

void Heatmap::merge(const Heatmap& other) {
    for (std::size_t i = 0; i < sums.size(); ++i) {
        sums[i] += other.sums[i];
        counts[i] += other.counts[i];
    }
}

bool Heatmap::has_value(int epoch, int bucket) const {
    if (metric == HeatmapMetric::DecisionRate) return true;
    return counts[cell(epoch, bucket)] > 0;
}

double Heatmap::value(int epoch, int bucket) const {
    const std::size_t i = cell(epoch, bucket);
    if (metric == HeatmapMetric::DecisionRate) return sums[i] / divisor;
    return counts[i] > 0 ? sums[i] / static_cast<double>(counts[i]) : 0.0;
}

double Heatmap::max_value() const {
    double m = 0.0;
    for (int t = 1; t <= horizon; ++t)
        for (int b = 0; b < kCapacityBuckets; ++b)
            if (has_value(t, b)) m = std::max(m, value(t, b));
    return m;
}

double Heatmap::total_sum() const {
    double s = 0.0;
    for (double v : sums) s += v;
    return s;
}

std::array<Heatmap, 5> build_heatmaps(std::span<const MetricRecord> records, int horizon) {
    std::array<Heatmap, 5> maps{
        Heatmap(HeatmapMetric::EOver, horizon), Heatmap(HeatmapMetric::EUnder, horizon),
        Heatmap(HeatmapMetric::RegretOver, horizon), Heatmap(HeatmapMetric::RegretUnder, horizon),
        Heatmap(HeatmapMetric::DecisionRate, horizon)};
    for (const MetricRecord& rec : records) {
        const int b = capacity_bucket(rec.capacity_pct);
        if (rec.has_decision) {
            maps[0].add(rec.epoch, b, rec.e_over);
            maps[1].add(rec.epoch, b, rec.e_under);
            maps[2].add(rec.epoch, b, rec.regret_over);
            maps[3].add(rec.epoch, b, rec.regret_under);
        }
        maps[4].add(rec.epoch, b, rec.rate);
    }
    return maps;
}

std::string_view label(PolicyId p) {
    switch (p) {
        case PolicyId::Optimal: return "optimal";
        case PolicyId::Dpc: return "dpc";
        case PolicyId::Mcts: return "mcts";
        case PolicyId::Myopic: return "myopic";
    }
    throw std::logic_error("bad PolicyId");
}

PolicyId parse_policy(std::string_view s) {
    if (s == "optimal") return PolicyId::Optimal;
    if (s == "dpc") return PolicyId::Dpc;
    if (s == "mcts") return PolicyId::Mcts;
    if (s == "myopic") return PolicyId::Myopic;
    throw std::invalid_argument("unknown policy: " + std::string(s));
}

std::optional<double> SettingSummary::error_ratio() const {
    if (regret_total_weighted == 0.0) return std::nullopt;
    return regret_over_weighted / regret_total_weighted;
}

namespace {

struct PolicyInstanceOutcome {
    double j_pi = 0;
    double gap = 0;
    double regret_over_weighted = 0;
    double regret_total_weighted = 0;
    std::array<Heatmap, 5> heatmaps;
};

struct TaskOutcome {
    int ordinal = 0;
    int instance_id = 0;
    double j_star = 0;
    std::vector<PolicyInstanceOutcome> per_policy;
    long long violations = 0;
    std::vector<std::string> notes;
    std::string error;
};

constexpr std::size_t kMaxViolationSamples = 20;

void note_violation(TaskOutcome& out, const std::string& what) {
    ++out.violations;
    if (out.notes.size() < kMaxViolationSamples) out.notes.push_back(what);
}

// Criterion checks that are cheap enough to run inline with the study.
void check_instance_invariants(TaskOutcome& out, const Instance& inst, const TourOracle& oracle,
                               const PolicySolution& optimal) {
    const int T = inst.horizon();
    for (int t = 1; t <= T; ++t) {
        const std::uint32_t limit = static_cast<std::uint32_t>(std::uint64_t(1) << (t - 1));
        for (std::uint32_t m = 0; m < limit; ++m) {
            const OrderSet s{m};
            if (!oracle.feasible(s) || !optimal.has_oc(t, s)) continue;
            if (optimal.oc_at(t, s) < -1e-9)
                note_violation(out, "negative true oc at s" + std::to_string(out.ordinal) + " i" +
                                        std::to_string(out.instance_id) + " t" + std::to_string(t) +
                                        " mask" + std::to_string(m));
        }
    }
}

void check_policy_invariants(TaskOutcome& out, const Instance& inst, std::string_view policy,
                             const std::vector<MetricRecord>& records, const RateTable& rates,
                             double j_star, double j_pi) {
    auto where = [&](const MetricRecord& rec) {
        return std::string(policy) + " s" + std::to_string(out.ordinal) + " i" +
               std::to_string(out.instance_id) + " t" + std::to_string(rec.epoch) + " mask" +
               std::to_string(rec.state.bits);
    };
    for (const MetricRecord& rec : records) {
        if (!rec.has_decision) continue;
        if (rec.regret < 0.0) note_violation(out, "negative regret at " + where(rec));
        if (rec.g_approx != rec.g_opt) {
            if (rec.g_approx && !rec.g_opt && !(rec.e_under > 0.0))
                note_violation(out, "wrong acceptance without underestimation at " + where(rec));
            if (!rec.g_approx && rec.g_opt && !(rec.e_over > 0.0))
                note_violation(out, "wrong rejection without overestimation at " + where(rec));
        }
    }
    if (auto ratio = weighted_error_ratio(records))
        if (*ratio < 0.0 || *ratio > 1.0)
            note_violation(out, "error ratio outside [0,1] for " + std::string(policy));
    for (int t = 1; t < static_cast<int>(rates.size()); ++t) {
        double total = 0.0;
        for (const auto& [bits, p] : rates[static_cast<std::size_t>(t)]) total += p;
        if (std::abs(total - kArrivalProb) > 1e-12)
            note_violation(out, "rate mass off 0.5 for " + std::string(policy) + " t" + std::to_string(t));
    }
    if (j_pi > j_star + 1e-9)
        note_violation(out, "policy value above optimal for " + std::string(policy) + " s" +
                                std::to_string(out.ordinal) + " i" + std::to_string(out.instance_id));
    (void)inst;
}

TaskOutcome run_task(const StudyConfig& cfg, const Setting& setting, int ordinal, int instance_id) {
    TaskOutcome out;
    out.ordinal = ordinal;
    out.instance_id = instance_id;
    const Instance inst = generate_instance(cfg.root_seed, setting, instance_id);
    const TourOracle oracle(inst);
    const PolicySolution optimal = solve_optimal(inst, oracle);
    out.j_star = optimal.root_value;
    if (cfg.check_invariants) check_instance_invariants(out, inst, oracle, optimal);

    for (PolicyId policy : cfg.policies) {
        PolicyInstanceOutcome po;
        std::optional<PolicySolution> solution;
        std::optional<DecisionRule> rule;
        switch (policy) {
            case PolicyId::Optimal: rule = as_rule(optimal); break;
            case PolicyId::Dpc: solution = solve_dpc(inst, oracle); rule = as_rule(*solution); break;
            case PolicyId::Mcts: solution = solve_mcts(inst, oracle); rule = as_rule(*solution); break;
            case PolicyId::Myopic: rule = myopic_rule(inst, oracle); break;
        }
        po.j_pi = evaluate_policy(*rule, inst, oracle).value;
        po.gap = optimality_gap(out.j_star, po.j_pi);
        const std::vector<MetricRecord> records = compute_errors(optimal, *rule, inst, oracle);
        for (const MetricRecord& rec : records) {
            po.regret_over_weighted += rec.regret_over * rec.rate;
            po.regret_total_weighted += (rec.regret_over + rec.regret_under) * rec.rate;
        }
        po.heatmaps = build_heatmaps(records, inst.horizon());
        if (cfg.check_invariants) {
            const RateTable rates = decision_rates(*rule, inst, oracle);
            check_policy_invariants(out, inst, label(policy), records, rates, out.j_star, po.j_pi);
        }
        out.per_policy.push_back(std::move(po));
    }
    return out;
}

}  // namespace

StudyReport run_study(const StudyConfig& config) {
    StudyReport report;
    report.config = config;
    const std::vector<Setting> catalogue = enumerate_settings();
    if (config.setting_filter.empty()) {
        report.ordinals.resize(catalogue.size());
        for (std::size_t i = 0; i < catalogue.size(); ++i) report.ordinals[i] = static_cast<int>(i);
    } else {
        report.ordinals = config.setting_filter;
        std::sort(report.ordinals.begin(), report.ordinals.end());
        report.ordinals.erase(std::unique(report.ordinals.begin(), report.ordinals.end()),
                              report.ordinals.end());
        for (int o : report.ordinals)
            if (o < 0 || o >= static_cast<int>(catalogue.size()))
                throw std::invalid_argument("setting ordinal out of range: " + std::to_string(o));
    }
    if (config.instances_per_setting < 1) throw std::invalid_argument("instances_per_setting must be >= 1");
    if (config.policies.empty()) throw std::invalid_argument("policy list must be nonempty");

    struct Task {
        int ordinal;
        int instance_id;
    };
    std::vector<Task> tasks;
    tasks.reserve(report.ordinals.size() * static_cast<std::size_t>(config.instances_per_setting));
    for (int o : report.ordinals)
        for (int i = 0; i < config.instances_per_setting; ++i) tasks.push_back({o, i});

    std::vector<TaskOutcome> outcomes(tasks.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            try {
                outcomes[i] = run_task(config, catalogue[static_cast<std::size_t>(task.ordinal)],
                                       task.ordinal, task.instance_id);
            } catch (const std::exception& e) {
                outcomes[i].ordinal = task.ordinal;
                outcomes[i].instance_id = task.instance_id;
                outcomes[i].error = e.what();
            }
        }
    };
    int workers = config.workers > 0 ? config.workers
                                     : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
    {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers) - 1);
        for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
        for (std::thread& th : pool) th.join();
    }

    // Deterministic reduction in (ordinal, instance, policy) order.
    const int T = kStudyHorizon;
    for (std::size_t s = 0; s < report.ordinals.size(); ++s) {
        const int ordinal = report.ordinals[s];
        std::vector<SettingSummary> row;
        for (PolicyId policy : config.policies) {
            SettingSummary sum;
            sum.setting = catalogue[static_cast<std::size_t>(ordinal)];
            sum.ordinal = ordinal;
            sum.policy = policy;
            for (std::size_t k = 0; k < sum.heatmaps.size(); ++k)
                sum.heatmaps[k] = Heatmap(static_cast<HeatmapMetric>(k), T);
            row.push_back(std::move(sum));
        }
        bool incomplete = false;
        for (int i = 0; i < config.instances_per_setting; ++i) {
            const TaskOutcome& out = outcomes[s * static_cast<std::size_t>(config.instances_per_setting) +
                                              static_cast<std::size_t>(i)];
            if (!out.error.empty()) {
                incomplete = true;
                const std::string what = "instance failed: s" + std::to_string(out.ordinal) + " i" +
                                         std::to_string(out.instance_id) + ": " + out.error;
                std::cerr << what << "\n";
                if (report.violation_samples.size() < kMaxViolationSamples)
                    report.violation_samples.push_back(what);
                continue;
            }
            report.invariant_violations += out.violations;
            for (const std::string& note : out.notes)
                if (report.violation_samples.size() < kMaxViolationSamples)
                    report.violation_samples.push_back(note);
            for (std::size_t p = 0; p < config.policies.size(); ++p) {
                const PolicyInstanceOutcome& po = out.per_policy[p];
                SettingSummary& sum = row[p];
                sum.instances += 1;
                sum.mean_j_star += out.j_star;
                sum.mean_j_pi += po.j_pi;
                sum.mean_gap += po.gap;
                sum.regret_over_weighted += po.regret_over_weighted;
                sum.regret_total_weighted += po.regret_total_weighted;
                for (std::size_t k = 0; k < sum.heatmaps.size(); ++k) sum.heatmaps[k].merge(po.heatmaps[k]);
            }
        }
        if (incomplete) report.incomplete_settings.push_back(ordinal);
        for (SettingSummary& sum : row) {
            if (sum.instances > 0) {
                sum.mean_j_star /= sum.instances;
                sum.mean_j_pi /= sum.instances;
                sum.mean_gap /= sum.instances;
                for (Heatmap& hm : sum.heatmaps) hm.divisor = sum.instances;
            }
            report.summaries.push_back(std::move(sum));
        }
    }

    for (PolicyId policy : config.policies) {
        PolicyStudyStats st;
        for (const SettingSummary& sum : report.summaries) {
            if (sum.policy != policy) continue;
            st.settings += 1;
            st.mean_gap += sum.mean_gap;
            if (auto ratio = sum.error_ratio()) {
                st.defined_ratio += 1;
                if (*ratio < 0.5) st.underestimation_dominant += 1;
            }
        }
        if (st.settings > 0) {
            st.mean_gap /= st.settings;
            st.dominance_fraction = static_cast<double>(st.underestimation_dominant) / st.settings;
        }
        report.stats[policy] = st;
    }

    if (config.sample_paths > 0)
        report.fidelity = rate_fidelity_check(config.root_seed, 10, config.sample_paths,
                                              mix64(config.root_seed ^ 0x524154455349Dull));

    if (!config.out_dir.empty()) write_study_artifacts(report, config.out_dir);
    return report;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string two_digits(int v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

std::string heatmap_csv(const Heatmap& hm) {
    std::string out = "t,bucket_lo,bucket_hi,mean_or_sum,count\n";
    for (int t = 1; t <= hm.horizon; ++t)
        for (int b = 0; b < kCapacityBuckets; ++b) {
            out += std::to_string(t);
            out += ',';
            out += std::to_string(10 * b);
            out += ',';
            out += std::to_string(10 * (b + 1));
            out += ',';
            if (hm.has_value(t, b)) out += format_real(hm.value(t, b));
            out += ',';
            out += std::to_string(hm.counts[hm.cell(t, b)]);
            out += '\n';
        }
    return out;
}

}  // namespace

void write_study_artifacts(const StudyReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path root(out_dir);
    fs::create_directories(root);

    std::string summary = "setting,loc,rev,prof,cons,policy,j_star,j_pi,gap,error_ratio,underest_dominant\n";
    for (const SettingSummary& sum : report.summaries) {
        const Setting& s = sum.setting;
        summary += std::to_string(sum.ordinal);
        summary += ',';
        summary += label(s.loc);
        summary += ',';
        summary += label(s.rev);
        summary += ',';
        summary += label(s.prof);
        summary += ',';
        summary += label(s.cons);
        summary += ',';
        summary += label(sum.policy);
        summary += ',';
        summary += format_real(sum.mean_j_star);
        summary += ',';
        summary += format_real(sum.mean_j_pi);
        summary += ',';
        summary += format_real(sum.mean_gap);
        summary += ',';
        const auto ratio = sum.error_ratio();
        summary += ratio ? format_real(*ratio) : "undefined";
        summary += ',';
        summary += (ratio && *ratio < 0.5) ? '1' : '0';
        summary += '\n';
    }
    write_file(root / "summary.csv", summary);

    for (const SettingSummary& sum : report.summaries) {
        const std::string base =
            "s" + two_digits(sum.ordinal) + "_" + std::string(label(sum.policy));
        for (const Heatmap& hm : sum.heatmaps)
            write_file(root / ("heatmap_" + base + "_" + std::string(label(hm.metric)) + ".csv"),
                       heatmap_csv(hm));
        write_file(root / ("panel_" + base + ".svg"),
                   render_heatmap_panel(sum.setting, label(sum.policy), sum.heatmaps));
    }
    write_file(root / "scatter.svg", render_scatter(report.summaries));

    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["command"] = "study";
    j["root_seed"] = report.config.root_seed;
    j["instances_per_setting"] = report.config.instances_per_setting;
    {
        std::vector<std::string> names;
        for (PolicyId p : report.config.policies) names.emplace_back(label(p));
        j["policies"] = names;
    }
    j["settings"] = report.ordinals.size();
    nlohmann::ordered_json stats = nlohmann::ordered_json::object();
    for (const auto& [policy, st] : report.stats) {
        nlohmann::ordered_json entry;
        entry["settings"] = st.settings;
        entry["defined_error_ratio"] = st.defined_ratio;
        entry["underestimation_dominant"] = st.underestimation_dominant;
        entry["dominance_fraction"] = st.dominance_fraction;
        entry["mean_gap"] = st.mean_gap;
        stats[std::string(label(policy))] = entry;
    }
    j["dominance"] = stats;
    j["invariant_checks"] = {{"enabled", report.config.check_invariants},
                             {"violations", report.invariant_violations},
                             {"samples", report.violation_samples}};
    j["incomplete_settings"] = report.incomplete_settings;
    if (report.fidelity) {
        const RateFidelityResult& f = *report.fidelity;
        j["rate_fidelity"] = {{"sample_paths", report.config.sample_paths},
                              {"pairs", f.pairs},
                              {"cells", f.cells},
                              {"outliers", f.outliers},
                              {"allowed_outliers", f.allowed_outliers},
                              {"max_z", f.max_z},
                              {"pass", f.pass}};
    }
    write_file(root / "report.json", j.dump(2) + "\n");

    nlohmann::ordered_json manifest;
    manifest["format_version"] = 1;
    manifest["command"] = "study";
    manifest["tool_version"] = "0.1.0";
    manifest["root_seed"] = report.config.root_seed;
    manifest["instances_per_setting"] = report.config.instances_per_setting;
    {
        std::vector<std::string> names;
        for (PolicyId p : report.config.policies) names.emplace_back(label(p));
        manifest["policies"] = names;
    }
    manifest["setting_filter"] = report.ordinals;
    manifest["check_invariants"] = report.config.check_invariants;
    // Worker count intentionally omitted: it must not affect any output byte.
    write_file(root / "manifest.json", manifest.dump(2) + "\n");
}

RateFidelityResult rate_fidelity_check(std::uint64_t root_seed, int num_pairs, long long num_paths,
                                       std::uint64_t sim_seed) {
    const std::vector<Setting> catalogue = enumerate_settings();
    const std::array<PolicyId, 3> cycle{PolicyId::Dpc, PolicyId::Mcts, PolicyId::Myopic};
    RateFidelityResult res;
    res.pairs = num_pairs;
    for (int k = 0; k < num_pairs; ++k) {
        const int ordinal = static_cast<int>((static_cast<std::size_t>(k) * 7 + 3) % catalogue.size());
        const Setting& setting = catalogue[static_cast<std::size_t>(ordinal)];
        const Instance inst = generate_instance(root_seed, setting, k);
        const TourOracle oracle(inst);
        const PolicySolution optimal = solve_optimal(inst, oracle);
        const PolicyId policy = cycle[static_cast<std::size_t>(k) % cycle.size()];
        std::optional<PolicySolution> solution;
        std::optional<DecisionRule> rule;
        switch (policy) {
            case PolicyId::Dpc: solution = solve_dpc(inst, oracle); rule = as_rule(*solution); break;
            case PolicyId::Mcts: solution = solve_mcts(inst, oracle); rule = as_rule(*solution); break;
            default: rule = myopic_rule(inst, oracle); break;
        }
        const RateTable exact = decision_rates(*rule, inst, oracle);
        const RateTable sampled =
            sampled_decision_rates(*rule, inst, oracle, num_paths, mix64(sim_seed + static_cast<std::uint64_t>(k)));
        for (int t = 1; t <= inst.horizon(); ++t) {
            for (const auto& [bits, p] : exact[static_cast<std::size_t>(t)]) {
                double hat = 0.0;
                if (auto it = sampled[static_cast<std::size_t>(t)].find(bits);
                    it != sampled[static_cast<std::size_t>(t)].end())
                    hat = it->second;
                const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(num_paths));
                const double z = sigma > 0.0 ? std::abs(hat - p) / sigma : 0.0;
                res.max_z = std::max(res.max_z, z);
                res.cells += 1;
                if (z > 3.0) res.outliers += 1;
            }
        }
    }
    // P(|z| > 3) for a binomial cell; the outlier count is itself binomial.
    const double p_out = 0.0027;
    const double expected = static_cast<double>(res.cells) * p_out;
    res.allowed_outliers = expected + 3.0 * std::sqrt(static_cast<double>(res.cells) * p_out * (1.0 - p_out));
    res.pass = static_cast<double>(res.outliers) <= res.allowed_outliers;
    return res;
}

}  // namespace dmvrp
