#include "dmvrp/instgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dmvrp {

namespace {
constexpr double kClusterNearMean = -10.0;
constexpr double kClusterFarMean = 20.0;
constexpr double kClusterSd = 2.5;
}

std::uint64_t StreamRng::next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double StreamRng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double StreamRng::next_uniform(double lo, double hi) {
    return lo + next_unit() * (hi - lo);
}

double StreamRng::next_normal(double mean, double sd) {
    for (;;) {
        double u = 2.0 * next_unit() - 1.0;
        double v = 2.0 * next_unit() - 1.0;
        double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return mean + sd * (u * std::sqrt(-2.0 * std::log(s) / s));
    }
}

int StreamRng::next_below(int n) {
    const std::uint64_t bound =
        std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= bound);
    return static_cast<int>(x % static_cast<std::uint64_t>(n));
}

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_instance_seed(std::uint64_t root_seed, int setting_ordinal, int instance_id) {
    std::uint64_t h = mix64(root_seed + 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ (static_cast<std::uint64_t>(setting_ordinal) + 0xBF58476D1CE4E5B9ULL));
    h = mix64(h ^ (static_cast<std::uint64_t>(instance_id) + 0x94D049BB133111EBULL));
    return h;
}

namespace {

double truncated_normal(StreamRng& rng, double mean, double sd) {
    // Bounds unstated upstream; the enclosing segment is the only bound defined.
    for (;;) {
        double x = rng.next_normal(mean, sd);
        if (x >= kSegmentMin && x <= kSegmentMax) return x;
    }
}

}  // namespace

std::vector<LocationDraw> sample_locations(const Setting& setting, StreamRng& rng) {
    const int n = setting.horizon;
    std::vector<LocationDraw> draws;
    draws.reserve(static_cast<std::size_t>(n));
    if (setting.loc == LocationDist::Unif) {
        for (int i = 0; i < n; ++i)
            draws.push_back({rng.next_uniform(kSegmentMin, kSegmentMax), -1});
        return draws;
    }
    const int near = n / 2;
    for (int i = 0; i < near; ++i)
        draws.push_back({truncated_normal(rng, kClusterNearMean, kClusterSd), 0});
    for (int i = near; i < n; ++i)
        draws.push_back({truncated_normal(rng, kClusterFarMean, kClusterSd), 1});
    // Fisher-Yates; the stream arrives in random order.
    for (int i = n - 1; i > 0; --i) {
        int j = rng.next_below(i + 1);
        std::swap(draws[static_cast<std::size_t>(i)], draws[static_cast<std::size_t>(j)]);
    }
    return draws;
}

std::vector<double> assign_revenues(const Setting& setting, const std::vector<LocationDraw>& draws,
                                    StreamRng& rng) {
    if (!setting.valid()) throw std::invalid_argument("invalid setting: clust_sort requires heterogeneous revenues");
    const int n = static_cast<int>(draws.size());
    std::vector<double> revenues(static_cast<std::size_t>(n), kRevenueLow);
    if (setting.rev == RevenueDist::Homog) return revenues;

    std::vector<int> candidates;
    for (int i = 0; i < n; ++i)
        if (setting.loc != LocationDist::ClustSort || draws[static_cast<std::size_t>(i)].cluster == 1)
            candidates.push_back(i);
    const int high = n * 3 / 10;
    if (static_cast<int>(candidates.size()) < high)
        throw std::logic_error("not enough candidates for high-revenue assignment");
    for (int k = 0; k < high; ++k) {
        int j = k + rng.next_below(static_cast<int>(candidates.size()) - k);
        std::swap(candidates[static_cast<std::size_t>(k)], candidates[static_cast<std::size_t>(j)]);
        revenues[static_cast<std::size_t>(candidates[static_cast<std::size_t>(k)])] = kRevenueHigh;
    }
    return revenues;
}

Instance order_stream(const Setting& setting, const std::vector<LocationDraw>& draws,
                      const std::vector<double>& revenues) {
    if (draws.size() != revenues.size()) throw std::invalid_argument("draws/revenues size mismatch");
    Instance inst;
    inst.setting = setting;
    inst.customers.reserve(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i)
        inst.customers.push_back(Customer{0, draws[i].location, revenues[i]});

    auto is_high = [](const Customer& c) { return c.revenue == kRevenueHigh; };
    if (setting.rev == RevenueDist::HbL) {
        std::stable_sort(inst.customers.begin(), inst.customers.end(),
                         [&](const Customer& a, const Customer& b) { return is_high(a) > is_high(b); });
    } else if (setting.rev == RevenueDist::LbH) {
        std::stable_sort(inst.customers.begin(), inst.customers.end(),
                         [&](const Customer& a, const Customer& b) { return is_high(a) < is_high(b); });
    }
    for (std::size_t i = 0; i < inst.customers.size(); ++i)
        inst.customers[i].index = static_cast<int>(i) + 1;
    return inst;
}

Instance generate_instance(std::uint64_t root_seed, const Setting& setting, int instance_id) {
    const int ordinal = setting_ordinal(setting);
    const std::uint64_t seed = derive_instance_seed(root_seed, ordinal, instance_id);
    StreamRng rng(seed);
    auto draws = sample_locations(setting, rng);
    auto revenues = assign_revenues(setting, draws, rng);
    Instance inst = order_stream(setting, draws, revenues);
    inst.instance_id = instance_id;
    inst.seed = seed;
    return inst;
}

}  // namespace dmvrp
