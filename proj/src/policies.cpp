#include "dmvrp/policies.hpp"

#include "dmvrp/dp.hpp"

namespace dmvrp {

DecisionRule myopic_rule(const Instance& inst, const TourOracle& oracle) {
    auto oc = [&inst, &oracle](int epoch, OrderSet state) {
        return oracle.cost(state.with(epoch)) - oracle.cost(state);
    };
    auto decide = [&inst, &oracle, oc](int epoch, OrderSet state) {
        if (!oracle.feasible(state.with(epoch))) return false;
        return threshold_accept(inst.customer(epoch).revenue, oc(epoch, state));
    };
    return DecisionRule("myopic", oc, decide);
}

DecisionRule as_rule(const PolicySolution& solution) {
    return DecisionRule(
        std::string(label(solution.kind)),
        [&solution](int epoch, OrderSet state) { return solution.oc_at(epoch, state); },
        [&solution](int epoch, OrderSet state) { return solution.decide(epoch, state); });
}

}  // namespace dmvrp
