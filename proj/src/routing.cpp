#include "dmvrp/routing.hpp"

#include <algorithm>

namespace dmvrp {

double optimal_tour_length(std::span<const double> locations) {
    double lo = 0.0, hi = 0.0;
    for (double x : locations) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return 2.0 * (hi - lo);
}

TourOracle::TourOracle(const Instance& inst) : TourOracle(inst, inst.setting.cost_factor()) {}

TourOracle::TourOracle(const Instance& inst, double cost_factor)
    : horizon_(inst.horizon()), cost_factor_(cost_factor) {
    if (horizon_ > 20) throw std::invalid_argument("horizon out of range");
    const std::size_t n = std::size_t(1) << horizon_;
    lengths_.resize(n);
    feasible_.resize(n);
    for (std::uint32_t mask = 0; mask < n; ++mask) {
        double lo = 0.0, hi = 0.0;
        for (int c = 1; c <= horizon_; ++c) {
            if ((mask >> (c - 1)) & 1u) {
                double x = inst.customer(c).location;
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        }
        lengths_[mask] = 2.0 * (hi - lo);
        switch (inst.setting.cons) {
            case ConstraintType::Load:
                feasible_[mask] = std::popcount(mask) <= inst.setting.load_capacity();
                break;
            case ConstraintType::Dist:
                feasible_[mask] = lengths_[mask] <= inst.setting.route_limit();
                break;
        }
    }
}

bool is_feasible(OrderSet s, const Instance& inst) {
    switch (inst.setting.cons) {
        case ConstraintType::Load:
            return s.size() <= inst.setting.load_capacity();
        case ConstraintType::Dist: {
            std::vector<double> pts;
            for (int c = 1; c <= inst.horizon(); ++c)
                if (s.contains(c)) pts.push_back(inst.customer(c).location);
            return optimal_tour_length(pts) <= inst.setting.route_limit();
        }
    }
    throw std::logic_error("bad ConstraintType");
}

}  // namespace dmvrp
