#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dmvrp/domain.hpp"
#include "dmvrp/policies.hpp"
#include "dmvrp/routing.hpp"

// Exact backward-recursion solvers. With one potential arrival per epoch
// and routing folded into the terminal value, every recursion has the shape
//
//   W[t-1](A) = 0.5 * gain(g, r_t, dW) + W[t](A),   dW = W[t](A) - W[t](A+t),
//
// over feasible order sets A within customers 1..t-1, with g forced to 0
// when A+t is infeasible.
namespace dmvrp {

enum class PolicyKind { Optimal, Dpc, Mcts };
std::string_view label(PolicyKind k);

// Iteration order over states inside one epoch sweep; the recursion only
// reads the next epoch's table, so results must not depend on it.
enum class SweepOrder { Ascending, Descending };

struct PolicySolution {
    PolicyKind kind = PolicyKind::Optimal;
    ValueTable table;  // V / R~ / F~ over epochs 0..T
    // Indexed [epoch-1][mask]; decision -1 marks states outside the solved set.
    std::vector<std::vector<std::int8_t>> decisions;
    std::vector<std::vector<double>> oc_estimates;  // NaN when acceptance is infeasible
    double root_value = 0;
    int horizon = 0;

    bool solved(int epoch, OrderSet state) const;
    bool decide(int epoch, OrderSet state) const;     // throws on unsolved states
    bool has_oc(int epoch, OrderSet state) const;
    double oc_at(int epoch, OrderSet state) const;    // throws when acceptance is infeasible
};

PolicySolution solve_optimal(const Instance& inst, const TourOracle& oracle,
                             SweepOrder order = SweepOrder::Ascending);
// Revenue-only recursion: terminal value 0, displacement of future revenue
// is the whole opportunity-cost estimate.
PolicySolution solve_dpc(const Instance& inst, const TourOracle& oracle,
                         SweepOrder order = SweepOrder::Ascending);
// Cost-only recursion: revenue enters the accept decision but never the
// value, so the estimate is the marginal cost to serve.
PolicySolution solve_mcts(const Instance& inst, const TourOracle& oracle,
                          SweepOrder order = SweepOrder::Ascending);

struct PolicyEvaluation {
    ValueTable table;  // kind PolicyValue
    double value = 0;  // exact expected true profit of following the rule
    // Set when the rule ever accepts an infeasible request (the acceptance
    // is then treated as a rejection for the propagation).
    bool accepted_infeasible = false;
};

PolicyEvaluation evaluate_policy(const DecisionRule& rule, const Instance& inst,
                                 const TourOracle& oracle);

// Revenue/cost split of the optimal value function propagated along the
// optimal decisions; satisfies V = R + F pointwise.
struct RewardDecomposition {
    ValueTable revenue_share;
    ValueTable cost_share;
};

RewardDecomposition decompose_optimal(const PolicySolution& optimal, const Instance& inst,
                                      const TourOracle& oracle);

// Debug dump, columns (kind, epoch, mask, value); mask is a T-character bitstring.
void write_tables_csv(std::ostream& os, std::span<const ValueTable* const> tables);

}  // namespace dmvrp
