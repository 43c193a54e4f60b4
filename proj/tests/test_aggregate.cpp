#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "dmvrp/aggregate.hpp"
#include "dmvrp/dp.hpp"
#include "dmvrp/instgen.hpp"

using namespace dmvrp;

namespace {

std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream is(entry.path(), std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        files[std::filesystem::relative(entry.path(), root).string()] = os.str();
    }
    return files;
}

}  // namespace

TEST_CASE("capacity percentage per constraint regime") {
    Instance load;
    load.setting = Setting{LocationDist::Unif, RevenueDist::Homog, Profitability::Med,
                           ConstraintType::Load, 4};
    for (int c = 1; c <= 4; ++c) load.customers.push_back(Customer{c, 2.0 * c, 15.0});
    const TourOracle load_oracle(load);
    CHECK(capacity_pct(OrderSet{}, load, load_oracle) == 0.0);
    CHECK(capacity_pct(OrderSet{0b0111}, load, load_oracle) == 100.0);
    CHECK(capacity_pct(OrderSet{0b0001}, load, load_oracle) == doctest::Approx(100.0 / 3).epsilon(1e-12));

    Instance dist = load;
    dist.setting.cons = ConstraintType::Dist;
    dist.customers[0].location = 22.0;  // tour 44 out of 50
    const TourOracle dist_oracle(dist);
    CHECK(capacity_pct(OrderSet{0b0001}, dist, dist_oracle) == doctest::Approx(88.0).epsilon(1e-12));
}

TEST_CASE("capacity buckets are equal width with a closed top") {
    CHECK(capacity_bucket(0.0) == 0);
    CHECK(capacity_bucket(9.999) == 0);
    CHECK(capacity_bucket(10.0) == 1);
    CHECK(capacity_bucket(99.0) == 9);
    CHECK(capacity_bucket(100.0) == 9);
}

TEST_CASE("heatmaps place records and keep the rate mass") {
    MetricRecord rec;
    rec.epoch = 1;
    rec.capacity_pct = 0.0;
    rec.has_decision = true;
    rec.e_under = 12.0;
    rec.rate = 0.5;
    std::vector<MetricRecord> records{rec};
    const auto maps = build_heatmaps(records, 10);
    CHECK(maps[1].value(1, 0) == 12.0);
    CHECK(maps[1].counts[maps[1].cell(1, 0)] == 1);
    for (int t = 1; t <= 10; ++t)
        for (int b = 0; b < kCapacityBuckets; ++b)
            if (!(t == 1 && b == 0)) CHECK(maps[1].counts[maps[1].cell(t, b)] == 0);
}

TEST_CASE("decision-rate heatmap sums to half the horizon") {
    const Instance inst = generate_instance(42, enumerate_settings()[3], 5);
    const TourOracle oracle(inst);
    const PolicySolution opt = solve_optimal(inst, oracle);
    const PolicySolution dpc = solve_dpc(inst, oracle);
    const auto records = compute_errors(opt, as_rule(dpc), inst, oracle);
    const auto maps = build_heatmaps(records, inst.horizon());
    CHECK(maps[4].total_sum() == doctest::Approx(5.0).epsilon(1e-12));

    // Optimal against itself: regret grids stay all-zero.
    const auto self_records = compute_errors(opt, as_rule(opt), inst, oracle);
    const auto self_maps = build_heatmaps(self_records, inst.horizon());
    CHECK(self_maps[2].max_value() == 0.0);
    CHECK(self_maps[3].max_value() == 0.0);
}

TEST_CASE("smoke study aggregates, pools and stays deterministic") {
    StudyConfig cfg;
    cfg.root_seed = 42;
    cfg.instances_per_setting = 4;
    cfg.policies = {PolicyId::Dpc, PolicyId::Mcts};
    cfg.setting_filter = {2, 31};
    cfg.workers = 2;

    const StudyReport report = run_study(cfg);
    CHECK(report.invariant_violations == 0);
    CHECK(report.summaries.size() == 4);
    CHECK(report.incomplete_settings.empty());

    // Pooled ratio equals recomputing from scratch on the same instances.
    for (const SettingSummary& sum : report.summaries) {
        double over = 0.0, total = 0.0;
        for (int i = 0; i < cfg.instances_per_setting; ++i) {
            const Instance inst = generate_instance(cfg.root_seed, sum.setting, i);
            const TourOracle oracle(inst);
            const PolicySolution opt = solve_optimal(inst, oracle);
            std::optional<PolicySolution> sol;
            if (sum.policy == PolicyId::Dpc) sol = solve_dpc(inst, oracle);
            else sol = solve_mcts(inst, oracle);
            for (const MetricRecord& rec : compute_errors(opt, as_rule(*sol), inst, oracle)) {
                over += rec.regret_over * rec.rate;
                total += (rec.regret_over + rec.regret_under) * rec.rate;
            }
        }
        CHECK(sum.regret_over_weighted == doctest::Approx(over).epsilon(1e-12));
        CHECK(sum.regret_total_weighted == doctest::Approx(total).epsilon(1e-12));
        if (total > 0.0) CHECK(*sum.error_ratio() == doctest::Approx(over / total).epsilon(1e-12));
        CHECK(sum.mean_j_pi <= sum.mean_j_star + 1e-9);
    }

    // Worker count must not change a single output byte.
    const auto tmp = std::filesystem::temp_directory_path();
    StudyConfig a = cfg, b = cfg;
    a.out_dir = (tmp / "dmvrp_test_a").string();
    b.out_dir = (tmp / "dmvrp_test_b").string();
    b.workers = 1;
    std::filesystem::remove_all(a.out_dir);
    std::filesystem::remove_all(b.out_dir);
    run_study(a);
    run_study(b);
    const auto ta = read_tree(a.out_dir), tb = read_tree(b.out_dir);
    CHECK(!ta.empty());
    REQUIRE(ta.size() == tb.size());
    for (const auto& [name, content] : ta) {
        REQUIRE(tb.count(name) == 1);
        CHECK(content == tb.at(name));
    }
    std::filesystem::remove_all(a.out_dir);
    std::filesystem::remove_all(b.out_dir);
}

TEST_CASE("optimal-only study reports zero gaps and undefined ratios") {
    StudyConfig cfg;
    cfg.instances_per_setting = 2;
    cfg.policies = {PolicyId::Optimal};
    cfg.setting_filter = {7, 44};
    const StudyReport report = run_study(cfg);
    for (const SettingSummary& sum : report.summaries) {
        CHECK(std::abs(sum.mean_gap) <= 1e-9);
        CHECK(!sum.error_ratio().has_value());
    }
    CHECK(report.stats.at(PolicyId::Optimal).defined_ratio == 0);
}

TEST_CASE("rate fidelity check passes at study scale") {
    const RateFidelityResult res = rate_fidelity_check(42, 3, 20000, 99);
    CHECK(res.pairs == 3);
    CHECK(res.cells > 0);
    CHECK(res.pass);
}
