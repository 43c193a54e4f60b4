#pragma once

#include <functional>
#include <string>

#include "dmvrp/domain.hpp"
#include "dmvrp/routing.hpp"

namespace dmvrp {

struct PolicySolution;

// Shared accept threshold: take the request when revenue covers the
// opportunity-cost estimate, ties resolved toward acceptance.
inline bool threshold_accept(double revenue, double oc) {
    return revenue - oc >= -kDecisionEps;
}

// Uniform decision surface over all policies. A rule is bound to one
// instance; callbacks must stay total over the feasible states they are
// queried on and fail fast otherwise. Rules capture the objects they wrap
// by reference, so the instance/solution must outlive the rule.
class DecisionRule {
public:
    DecisionRule(std::string name, std::function<double(int, OrderSet)> oc,
                 std::function<bool(int, OrderSet)> decide)
        : name_(std::move(name)), oc_(std::move(oc)), decide_(std::move(decide)) {}

    const std::string& name() const { return name_; }
    double oc(int epoch, OrderSet state) const { return oc_(epoch, state); }
    bool decide(int epoch, OrderSet state) const { return decide_(epoch, state); }

private:
    std::string name_;
    std::function<double(int, OrderSet)> oc_;
    std::function<bool(int, OrderSet)> decide_;
};

// Insertion cost into the current confirmed-order route plan, with full
// re-optimization of the tour (identical to cheapest insertion on a line).
DecisionRule myopic_rule(const Instance& inst, const TourOracle& oracle);

// Wraps a solved policy's stored decision/oc maps.
DecisionRule as_rule(const PolicySolution& solution);

}  // namespace dmvrp
