#include "dmvrp/dp.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace dmvrp {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Visits every feasible mask within customers 1..k.
template <class F>
void for_each_feasible(const TourOracle& oracle, int k, SweepOrder order, F&& fn) {
    const std::uint32_t limit = static_cast<std::uint32_t>((std::uint64_t(1) << k));
    if (order == SweepOrder::Ascending) {
        for (std::uint32_t m = 0; m < limit; ++m)
            if (oracle.feasible(OrderSet{m})) fn(OrderSet{m});
    } else {
        for (std::uint32_t m = limit; m-- > 0;)
            if (oracle.feasible(OrderSet{m})) fn(OrderSet{m});
    }
}

PolicySolution make_solution(PolicyKind kind, TableKind table_kind, int horizon) {
    PolicySolution s{kind, ValueTable(table_kind, horizon), {}, {}, 0.0, horizon};
    s.decisions.assign(static_cast<std::size_t>(horizon),
                       std::vector<std::int8_t>(std::size_t(1) << horizon, -1));
    s.oc_estimates.assign(static_cast<std::size_t>(horizon),
                          std::vector<double>(std::size_t(1) << horizon, kNan));
    return s;
}

// Backward sweep shared by the three solvers; `stage` maps
// (accept, revenue, delta) to the gain applied on the arrival branch.
template <class Terminal, class Stage>
PolicySolution run_backward(PolicyKind kind, TableKind table_kind, const Instance& inst,
                            const TourOracle& oracle, SweepOrder order, Terminal&& terminal,
                            Stage&& stage) {
    const int T = inst.horizon();
    PolicySolution sol = make_solution(kind, table_kind, T);
    for_each_feasible(oracle, T, order, [&](OrderSet s) { sol.table.set(T, s, terminal(s)); });
    for (int t = T; t >= 1; --t) {
        const double revenue = inst.customer(t).revenue;
        for_each_feasible(oracle, t - 1, order, [&](OrderSet s) {
            const double stay = sol.table.at(t, s);
            const OrderSet acc = s.with(t);
            const bool can_accept = oracle.feasible(acc);
            double delta = kNan;
            bool g = false;
            if (can_accept) {
                delta = stay - sol.table.at(t, acc);
                g = threshold_accept(revenue, delta);
                sol.oc_estimates[static_cast<std::size_t>(t) - 1][s.bits] = delta;
            }
            sol.decisions[static_cast<std::size_t>(t) - 1][s.bits] = g ? 1 : 0;
            const double gain = g ? stage(revenue, delta) : 0.0;
            sol.table.set(t - 1, s, kArrivalProb * gain + stay);
        });
    }
    sol.root_value = sol.table.at(0, OrderSet{});
    return sol;
}

}  // namespace

std::string_view label(PolicyKind k) {
    switch (k) {
        case PolicyKind::Optimal: return "optimal";
        case PolicyKind::Dpc: return "dpc";
        case PolicyKind::Mcts: return "mcts";
    }
    throw std::logic_error("bad PolicyKind");
}

bool PolicySolution::solved(int epoch, OrderSet state) const {
    if (epoch < 1 || epoch > horizon) return false;
    return decisions[static_cast<std::size_t>(epoch) - 1][state.bits] >= 0;
}

bool PolicySolution::decide(int epoch, OrderSet state) const {
    if (!solved(epoch, state))
        throw std::logic_error("decision lookup on unsolved state: epoch " + std::to_string(epoch) +
                               " mask " + std::to_string(state.bits));
    return decisions[static_cast<std::size_t>(epoch) - 1][state.bits] == 1;
}

bool PolicySolution::has_oc(int epoch, OrderSet state) const {
    return solved(epoch, state) && !std::isnan(oc_estimates[static_cast<std::size_t>(epoch) - 1][state.bits]);
}

double PolicySolution::oc_at(int epoch, OrderSet state) const {
    if (!has_oc(epoch, state))
        throw std::logic_error("oc lookup where acceptance is infeasible: epoch " + std::to_string(epoch) +
                               " mask " + std::to_string(state.bits));
    return oc_estimates[static_cast<std::size_t>(epoch) - 1][state.bits];
}

PolicySolution solve_optimal(const Instance& inst, const TourOracle& oracle, SweepOrder order) {
    return run_backward(
        PolicyKind::Optimal, TableKind::Optimal, inst, oracle, order,
        [&](OrderSet s) { return -oracle.cost(s); },
        [](double revenue, double delta) { return revenue - delta; });
}

PolicySolution solve_dpc(const Instance& inst, const TourOracle& oracle, SweepOrder order) {
    return run_backward(
        PolicyKind::Dpc, TableKind::DpcR, inst, oracle, order, [](OrderSet) { return 0.0; },
        [](double revenue, double delta) { return revenue - delta; });
}

PolicySolution solve_mcts(const Instance& inst, const TourOracle& oracle, SweepOrder order) {
    return run_backward(
        PolicyKind::Mcts, TableKind::MctsF, inst, oracle, order,
        [&](OrderSet s) { return -oracle.cost(s); },
        [](double, double delta) { return -delta; });
}

PolicyEvaluation evaluate_policy(const DecisionRule& rule, const Instance& inst,
                                 const TourOracle& oracle) {
    const int T = inst.horizon();
    PolicyEvaluation eval{ValueTable(TableKind::PolicyValue, T), 0.0, false};
    for_each_feasible(oracle, T, SweepOrder::Ascending,
                      [&](OrderSet s) { eval.table.set(T, s, -oracle.cost(s)); });
    for (int t = T; t >= 1; --t) {
        const double revenue = inst.customer(t).revenue;
        for_each_feasible(oracle, t - 1, SweepOrder::Ascending, [&](OrderSet s) {
            const double stay = eval.table.at(t, s);
            bool g = rule.decide(t, s);
            if (g && !oracle.feasible(s.with(t))) {
                eval.accepted_infeasible = true;
                g = false;
            }
            const double gain = g ? revenue - (stay - eval.table.at(t, s.with(t))) : 0.0;
            eval.table.set(t - 1, s, kArrivalProb * gain + stay);
        });
    }
    eval.value = eval.table.at(0, OrderSet{});
    return eval;
}

RewardDecomposition decompose_optimal(const PolicySolution& optimal, const Instance& inst,
                                      const TourOracle& oracle) {
    const int T = inst.horizon();
    RewardDecomposition dec{ValueTable(TableKind::RevenueShare, T), ValueTable(TableKind::CostShare, T)};
    for_each_feasible(oracle, T, SweepOrder::Ascending, [&](OrderSet s) {
        dec.revenue_share.set(T, s, 0.0);
        dec.cost_share.set(T, s, -oracle.cost(s));
    });
    for (int t = T; t >= 1; --t) {
        const double revenue = inst.customer(t).revenue;
        for_each_feasible(oracle, t - 1, SweepOrder::Ascending, [&](OrderSet s) {
            const bool g = optimal.decide(t, s);
            const double r_stay = dec.revenue_share.at(t, s);
            const double f_stay = dec.cost_share.at(t, s);
            double r_gain = 0.0, f_gain = 0.0;
            if (g) {
                const OrderSet acc = s.with(t);
                r_gain = revenue + dec.revenue_share.at(t, acc) - r_stay;
                f_gain = dec.cost_share.at(t, acc) - f_stay;
            }
            dec.revenue_share.set(t - 1, s, kArrivalProb * r_gain + r_stay);
            dec.cost_share.set(t - 1, s, kArrivalProb * f_gain + f_stay);
        });
    }
    return dec;
}

void write_tables_csv(std::ostream& os, std::span<const ValueTable* const> tables) {
    os << "kind,epoch,mask,value\n";
    for (const ValueTable* table : tables) {
        for (int t = 0; t <= table->horizon(); ++t)
            for (OrderSet s : table->states(t))
                os << label(table->kind()) << ',' << t << ',' << s.bitstring(table->horizon()) << ','
                   << format_real(table->at(t, s)) << '\n';
    }
}

}  // namespace dmvrp
