#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dmvrp/dp.hpp"
#include "dmvrp/domain.hpp"
#include "dmvrp/policies.hpp"
#include "dmvrp/routing.hpp"

namespace dmvrp {

// One (state, request) observation of an approximate policy against the
// optimal one. Error and regret fields are meaningful only when
// has_decision is set (acceptance feasible); rate is always meaningful.
struct MetricRecord {
    int epoch = 0;
    OrderSet state;
    bool has_decision = false;
    bool g_opt = false;
    bool g_approx = false;
    double capacity_pct = 0;
    double signed_error = 0;  // oc estimate minus true oc
    double e_over = 0;
    double e_under = 0;
    double regret = 0;
    double regret_over = 0;
    double regret_under = 0;
    double rate = 0;  // P(state, epoch) under the approximate policy
};

// rates[t][mask] = probability of being in `mask` at epoch t and facing
// request t. Index 0 is unused.
using RateTable = std::vector<std::map<std::uint32_t, double>>;

// Exact forward probability propagation; the expectation of the sampled
// estimator below.
RateTable decision_rates(const DecisionRule& rule, const Instance& inst, const TourOracle& oracle);

// Monte-Carlo estimate over num_paths simulated arrival paths.
RateTable sampled_decision_rates(const DecisionRule& rule, const Instance& inst,
                                 const TourOracle& oracle, long long num_paths, std::uint64_t seed);

// Emits one record per epoch for every state reachable under the
// approximate policy or under the optimal one, ordered by (epoch, mask).
std::vector<MetricRecord> compute_errors(const PolicySolution& optimal, const DecisionRule& approx,
                                         const Instance& inst, const TourOracle& oracle);

// Share of rate-weighted regret caused by overestimation; empty when the
// policy accumulates no regret at all.
std::optional<double> weighted_error_ratio(std::span<const MetricRecord> records);

double optimality_gap(double j_star, double j_pi);

// Fixed columns: policy,t,mask,capacity_pct,signed_error,e_over,e_under,
// regret,regret_over,regret_under,P. Error cells are left empty for
// records without a feasible acceptance.
void write_metrics_header(std::ostream& os);
void write_metrics_rows(std::ostream& os, std::string_view policy,
                        std::span<const MetricRecord> records, int horizon);
void write_metrics_csv(std::ostream& os, std::string_view policy,
                       std::span<const MetricRecord> records, int horizon);

}  // namespace dmvrp
