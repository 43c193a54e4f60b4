#pragma once

// Independent reference implementations used by tests and the selftest
// command. Nothing here may call into the solver paths it checks.

#include <cstdint>
#include <vector>

#include "dmvrp/domain.hpp"
#include "dmvrp/instgen.hpp"

namespace dmvrp::oracle {

// Closed-tour length from the depot through all points, minimized by brute
// force over visit permutations. Sums run in scaled 64-bit integers: every
// location the generators emit is an integer multiple of 2^-54, so the
// minimum is exact and rounds to double once.
double permutation_tour_length(const std::vector<double>& locations);

bool feasible(const Instance& inst, const std::vector<int>& accepted);

// Exact optimal expected profit by recursion over arrival histories with
// explicit accepted lists; no order-set state abstraction, no tour memo.
double adaptive_optimal_value(const Instance& inst);

// Random small instance for oracle equivalence tests; cycles through both
// constraint regimes, location shapes and revenue patterns via `variant`.
Instance random_instance(StreamRng& rng, int horizon, int variant);

}  // namespace dmvrp::oracle
