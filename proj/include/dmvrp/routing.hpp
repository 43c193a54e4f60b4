#pragma once

#include <span>
#include <vector>

#include "dmvrp/domain.hpp"

namespace dmvrp {

// Shortest closed tour from the depot (origin) through all points on the
// line: 2 * (max(0, rightmost) - min(0, leftmost)).
double optimal_tour_length(std::span<const double> locations);

// Per-instance tour-cost and feasibility oracle over all 2^T order sets.
// The optimal route is a pure function of the set, so nothing else is
// carried in the DP state.
class TourOracle {
public:
    explicit TourOracle(const Instance& inst);
    // Overrides the setting's routing cost factor (test hook, e.g. c_f = 0).
    TourOracle(const Instance& inst, double cost_factor);

    int horizon() const { return horizon_; }
    double cost_factor() const { return cost_factor_; }
    double length(OrderSet s) const { return lengths_[s.bits]; }
    double cost(OrderSet s) const { return cost_factor_ * lengths_[s.bits]; }
    bool feasible(OrderSet s) const { return feasible_[s.bits] != 0; }

private:
    int horizon_;
    double cost_factor_;
    std::vector<double> lengths_;
    std::vector<char> feasible_;
};

bool is_feasible(OrderSet s, const Instance& inst);

}  // namespace dmvrp
