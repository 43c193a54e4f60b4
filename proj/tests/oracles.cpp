#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dmvrp::oracle {

namespace {

// Exact int64 image of a double that is an integer multiple of 2^-54.
long long scaled54(double x) {
    if (x == 0.0) return 0;
    int e = 0;
    const double m = std::frexp(x, &e);                       // x = m * 2^e, |m| in [0.5, 1)
    const long long mant = std::llround(std::ldexp(m, 53));   // exact: 53-bit integer
    const int shift = e + 1;                                  // x * 2^54 = mant * 2^(e+1)
    if (shift >= 0) {
        if (shift > 10) throw std::invalid_argument("location out of supported range");
        return mant << shift;
    }
    const long long down = mant >> -shift;
    if ((down << -shift) != mant) throw std::invalid_argument("location is not a multiple of 2^-54");
    return down;
}

long long tour_by_permutations(const std::vector<long long>& pts) {
    if (pts.empty()) return 0;
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    long long best = -1;
    do {
        long long len = std::llabs(pts[order.front()]);
        for (std::size_t i = 1; i < order.size(); ++i)
            len += std::llabs(pts[order[i]] - pts[order[i - 1]]);
        len += std::llabs(pts[order.back()]);
        if (best < 0 || len < best) best = len;
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

long long scaled_tour(const std::vector<double>& locations) {
    std::vector<long long> pts;
    pts.reserve(locations.size());
    for (double x : locations) pts.push_back(scaled54(x));
    return tour_by_permutations(pts);
}

std::vector<double> accepted_locations(const Instance& inst, const std::vector<int>& accepted) {
    std::vector<double> pts;
    pts.reserve(accepted.size());
    for (int c : accepted) pts.push_back(inst.customer(c).location);
    return pts;
}

double go(const Instance& inst, int t, std::vector<int>& accepted) {
    if (t > inst.horizon()) {
        double profit = 0.0;
        for (int c : accepted) profit += inst.customer(c).revenue;
        return profit - inst.setting.cost_factor() * permutation_tour_length(accepted_locations(inst, accepted));
    }
    const double continued = go(inst, t + 1, accepted);  // same subtree for no-arrival and reject
    double best = continued;
    accepted.push_back(t);
    if (feasible(inst, accepted)) best = std::max(best, go(inst, t + 1, accepted));
    accepted.pop_back();
    return kArrivalProb * best + (1.0 - kArrivalProb) * continued;
}

}  // namespace

double permutation_tour_length(const std::vector<double>& locations) {
    if (locations.size() > 8) throw std::invalid_argument("permutation oracle limited to 8 points");
    return std::ldexp(static_cast<double>(scaled_tour(locations)), -54);
}

bool feasible(const Instance& inst, const std::vector<int>& accepted) {
    switch (inst.setting.cons) {
        case ConstraintType::Load:
            return static_cast<int>(accepted.size()) <= inst.setting.load_capacity();
        case ConstraintType::Dist:
            return permutation_tour_length(accepted_locations(inst, accepted)) <= inst.setting.route_limit();
    }
    throw std::logic_error("bad ConstraintType");
}

double adaptive_optimal_value(const Instance& inst) {
    std::vector<int> accepted;
    return go(inst, 1, accepted);
}

Instance random_instance(StreamRng& rng, int horizon, int variant) {
    Instance inst;
    inst.setting.cons = (variant % 2 == 0) ? ConstraintType::Load : ConstraintType::Dist;
    switch ((variant / 2) % 3) {
        case 0: inst.setting.prof = Profitability::High; break;
        case 1: inst.setting.prof = Profitability::Med; break;
        default: inst.setting.prof = Profitability::Low; break;
    }
    inst.setting.loc = LocationDist::Unif;
    inst.setting.rev = RevenueDist::Rand;
    inst.setting.horizon = horizon;
    const int rev_pattern = (variant / 6) % 4;
    const bool clustered = (variant / 24) % 2 == 1;
    for (int c = 1; c <= horizon; ++c) {
        double loc = clustered ? (c % 2 == 0 ? rng.next_uniform(15.0, 25.0) : rng.next_uniform(-14.0, -6.0))
                               : rng.next_uniform(kSegmentMin, kSegmentMax);
        double rev = kRevenueLow;
        switch (rev_pattern) {
            case 0: break;                                                       // homogeneous
            case 1: rev = rng.next_unit() < 0.3 ? kRevenueHigh : kRevenueLow; break;  // random
            case 2: rev = c <= horizon / 3 ? kRevenueHigh : kRevenueLow; break;  // high first
            default: rev = c > horizon - horizon / 3 ? kRevenueHigh : kRevenueLow; break;  // high last
        }
        inst.customers.push_back(Customer{c, loc, rev});
    }
    return inst;
}

}  // namespace dmvrp::oracle
