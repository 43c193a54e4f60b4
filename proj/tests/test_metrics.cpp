#include <cmath>
#include <sstream>

#include "doctest.h"
#include "dmvrp/aggregate.hpp"
#include "dmvrp/instgen.hpp"
#include "dmvrp/metrics.hpp"
#include "oracles.hpp"

using namespace dmvrp;

namespace {

Instance toy_instance() {
    Instance inst;
    inst.setting = Setting{LocationDist::Unif, RevenueDist::Homog, Profitability::Med,
                           ConstraintType::Dist, 1};
    inst.customers.push_back(Customer{1, 10.0, 15.0});
    return inst;
}

Instance two_customer_instance() {
    Instance inst;
    inst.setting = Setting{LocationDist::Unif, RevenueDist::Homog, Profitability::High,
                           ConstraintType::Load, 2};
    inst.customers.push_back(Customer{1, 5.0, 15.0});
    inst.customers.push_back(Customer{2, -5.0, 15.0});
    return inst;
}

}  // namespace

TEST_CASE("decision rates conserve probability mass") {
    const Instance inst = generate_instance(42, enumerate_settings()[14], 0);
    const TourOracle oracle(inst);
    const PolicySolution opt = solve_optimal(inst, oracle);
    const RateTable rates = decision_rates(as_rule(opt), inst, oracle);
    for (int t = 1; t <= inst.horizon(); ++t) {
        double total = 0.0;
        for (const auto& [bits, p] : rates[static_cast<std::size_t>(t)]) total += p;
        CHECK(std::abs(total - 0.5) <= 1e-12);
    }
}

TEST_CASE("reject-everything keeps all mass at the empty state") {
    const Instance inst = two_customer_instance();
    const TourOracle oracle(inst);
    const DecisionRule reject("reject", [](int, OrderSet) { return 0.0; },
                              [](int, OrderSet) { return false; });
    const RateTable rates = decision_rates(reject, inst, oracle);
    for (int t = 1; t <= 2; ++t) {
        CHECK(rates[static_cast<std::size_t>(t)].size() == 1);
        CHECK(rates[static_cast<std::size_t>(t)].at(0u) == 0.5);
    }
}

TEST_CASE("accept-everything splits mass over the four sample paths") {
    const Instance inst = two_customer_instance();
    const TourOracle oracle(inst);
    const DecisionRule accept("accept", [](int, OrderSet) { return 0.0; },
                              [](int, OrderSet) { return true; });
    const RateTable rates = decision_rates(accept, inst, oracle);
    CHECK(rates[1].at(0u) == 0.5);
    CHECK(rates[2].at(0u) == 0.25);
    CHECK(rates[2].at(1u) == 0.25);  // P({1}, 2)
}

TEST_CASE("optimal against itself carries no error and no regret") {
    const Instance inst = generate_instance(42, enumerate_settings()[8], 1);
    const TourOracle oracle(inst);
    const PolicySolution opt = solve_optimal(inst, oracle);
    const auto records = compute_errors(opt, as_rule(opt), inst, oracle);
    CHECK(!records.empty());
    for (const MetricRecord& rec : records) {
        CHECK(rec.signed_error == 0.0);
        CHECK(rec.regret == 0.0);
    }
    CHECK(!weighted_error_ratio(records).has_value());
}

TEST_CASE("toy dpc record shows error without regret") {
    const Instance inst = toy_instance();
    const TourOracle oracle(inst);
    const PolicySolution opt = solve_optimal(inst, oracle);
    const PolicySolution dpc = solve_dpc(inst, oracle);
    const auto records = compute_errors(opt, as_rule(dpc), inst, oracle);
    REQUIRE(records.size() == 1);
    const MetricRecord& rec = records.front();
    CHECK(rec.epoch == 1);
    CHECK(rec.has_decision);
    CHECK(rec.signed_error == doctest::Approx(-12.0).epsilon(1e-12));
    CHECK(rec.e_under == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(rec.e_over == 0.0);
    CHECK(rec.g_opt);
    CHECK(rec.g_approx);
    CHECK(rec.regret == 0.0);
    CHECK(rec.rate == 0.5);
}

TEST_CASE("a flipped decision pays the absolute margin as regret") {
    StreamRng rng(500);
    int flips = 0;
    for (int variant = 0; variant < 24 && flips < 5; ++variant) {
        const Instance inst = oracle::random_instance(rng, 6, variant);
        const TourOracle oracle(inst);
        const PolicySolution opt = solve_optimal(inst, oracle);
        for (auto approx : {solve_dpc, solve_mcts}) {
            const PolicySolution sol = approx(inst, oracle, SweepOrder::Ascending);
            for (const MetricRecord& rec : compute_errors(opt, as_rule(sol), inst, oracle)) {
                if (!rec.has_decision || rec.g_opt == rec.g_approx) continue;
                ++flips;
                const double margin = inst.customer(rec.epoch).revenue - opt.oc_at(rec.epoch, rec.state);
                CHECK(rec.regret == doctest::Approx(std::abs(margin)).epsilon(1e-12));
                CHECK(rec.regret >= 0.0);
                if (rec.g_approx && !rec.g_opt) CHECK(rec.e_under > 0.0);
                if (!rec.g_approx && rec.g_opt) CHECK(rec.e_over > 0.0);
            }
        }
    }
    CHECK(flips > 0);
}

TEST_CASE("weighted error ratio hits its boundary readings") {
    MetricRecord over;
    over.has_decision = true;
    over.regret = over.regret_over = 2.0;
    over.rate = 0.25;
    MetricRecord under;
    under.has_decision = true;
    under.regret = under.regret_under = 3.0;
    under.rate = 0.5;

    std::vector<MetricRecord> only_over{over};
    CHECK(weighted_error_ratio(only_over) == 1.0);
    std::vector<MetricRecord> only_under{under};
    CHECK(weighted_error_ratio(only_under) == 0.0);
    std::vector<MetricRecord> both{over, under};
    CHECK(*weighted_error_ratio(both) == doctest::Approx(0.5 / 2.0).epsilon(1e-12));
    std::vector<MetricRecord> none;
    CHECK(!weighted_error_ratio(none).has_value());
}

TEST_CASE("optimality gap is relative with an epsilon floor") {
    CHECK(optimality_gap(1.5, 1.5) == 0.0);
    CHECK(optimality_gap(1.5, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(optimality_gap(0.0, -2.0) > 0.0);
    CHECK(optimality_gap(-4.0, -6.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sampled rates converge to the exact propagation") {
    const Instance inst = generate_instance(42, enumerate_settings()[30], 4);
    const TourOracle oracle(inst);
    const PolicySolution mcts = solve_mcts(inst, oracle);
    const DecisionRule rule = as_rule(mcts);
    const RateTable exact = decision_rates(rule, inst, oracle);
    const long long paths = 20000;
    const RateTable sampled = sampled_decision_rates(rule, inst, oracle, paths, 7);
    for (int t = 1; t <= inst.horizon(); ++t) {
        for (const auto& [bits, p] : exact[static_cast<std::size_t>(t)]) {
            double hat = 0.0;
            if (auto it = sampled[static_cast<std::size_t>(t)].find(bits);
                it != sampled[static_cast<std::size_t>(t)].end())
                hat = it->second;
            const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(paths));
            CHECK(std::abs(hat - p) <= 5.0 * sigma + 1e-12);
        }
    }
}

TEST_CASE("metrics csv uses the fixed column set") {
    const Instance inst = toy_instance();
    const TourOracle oracle(inst);
    const PolicySolution opt = solve_optimal(inst, oracle);
    const PolicySolution dpc = solve_dpc(inst, oracle);
    const auto records = compute_errors(opt, as_rule(dpc), inst, oracle);
    std::ostringstream os;
    write_metrics_csv(os, "dpc", records, inst.horizon());
    const std::string text = os.str();
    CHECK(text.rfind("policy,t,mask,capacity_pct,signed_error,e_over,e_under,regret,"
                     "regret_over,regret_under,P\n", 0) == 0);
    CHECK(text.find("dpc,1,0,") != std::string::npos);
    CHECK(text.find("\r") == std::string::npos);  // LF endings only
}
