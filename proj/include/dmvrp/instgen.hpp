#pragma once

#include <cstdint>
#include <vector>

#include "dmvrp/domain.hpp"

namespace dmvrp {

// SplitMix64 stream. Chosen so instance generation is reproducible from a
// bare 64-bit seed without touching platform-defined std distributions.
class StreamRng {
public:
    explicit StreamRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double next_unit();  // [0, 1), 53-bit resolution
    double next_uniform(double lo, double hi);
    double next_normal(double mean, double sd);  // Marsaglia polar, no caching
    int next_below(int n);                       // unbiased [0, n)

private:
    std::uint64_t state_;
};

// Stateless mixing step underlying the per-instance seed derivation.
std::uint64_t mix64(std::uint64_t x);
// seed = mix64-chain over (root_seed, setting ordinal, instance_id); any
// instance regenerates independently of the others.
std::uint64_t derive_instance_seed(std::uint64_t root_seed, int setting_ordinal, int instance_id);

struct LocationDraw {
    double location = 0;
    int cluster = -1;  // -1 uniform, 0 near cluster (-10), 1 distant cluster (20)
};

// Unif: T i.i.d. uniform draws. Clust/ClustSort: T/2 each from the near and
// distant truncated normals, shuffled into a random arrival order.
std::vector<LocationDraw> sample_locations(const Setting& setting, StreamRng& rng);

// Homog: all 15. Heterogeneous: exactly 30% high-revenue (25), positions
// uniform over the stream, or over the distant cluster for ClustSort.
std::vector<double> assign_revenues(const Setting& setting, const std::vector<LocationDraw>& draws,
                                    StreamRng& rng);

// Applies the h-b-l / l-b-h class ordering (stable within a class) and
// assigns arrival indices 1..T.
Instance order_stream(const Setting& setting, const std::vector<LocationDraw>& draws,
                      const std::vector<double>& revenues);

Instance generate_instance(std::uint64_t root_seed, const Setting& setting, int instance_id);

}  // namespace dmvrp
