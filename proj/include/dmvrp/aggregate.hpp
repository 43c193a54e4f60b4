#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dmvrp/domain.hpp"
#include "dmvrp/metrics.hpp"
#include "dmvrp/routing.hpp"

namespace dmvrp {

// Consumed share of the binding capacity: order count against the load
// limit, or tour length against the route-length limit.
double capacity_pct(OrderSet state, const Instance& inst, const TourOracle& oracle);

enum class HeatmapMetric { EOver, EUnder, RegretOver, RegretUnder, DecisionRate };
std::string_view label(HeatmapMetric m);

inline constexpr int kCapacityBuckets = 10;
// Equal-width buckets [0,10), ..., [90,100]; 100% lands in the top bucket.
int capacity_bucket(double pct);

// Epoch x capacity-bucket lookup table. Error/regret cells report the mean
// over contributing records; the decision-rate cell reports summed rate
// (divided by `divisor`, the instance count after cross-instance pooling).
struct Heatmap {
    HeatmapMetric metric = HeatmapMetric::EOver;
    int horizon = 0;
    int divisor = 1;
    std::vector<double> sums;        // horizon * kCapacityBuckets
    std::vector<long long> counts;

    Heatmap() = default;
    Heatmap(HeatmapMetric m, int T);

    std::size_t cell(int epoch, int bucket) const;
    void add(int epoch, int bucket, double value);
    void merge(const Heatmap& other);
    bool has_value(int epoch, int bucket) const;
    double value(int epoch, int bucket) const;  // mean or scaled sum per metric
    double max_value() const;
    double total_sum() const;
};

std::array<Heatmap, 5> build_heatmaps(std::span<const MetricRecord> records, int horizon);

enum class PolicyId { Optimal, Dpc, Mcts, Myopic };
std::string_view label(PolicyId p);
PolicyId parse_policy(std::string_view s);

struct SettingSummary {
    Setting setting;
    int ordinal = 0;
    PolicyId policy = PolicyId::Optimal;
    int instances = 0;
    double mean_j_star = 0;
    double mean_j_pi = 0;
    double mean_gap = 0;
    // Pooled numerator/denominator of the weighted error ratio across the
    // setting's instances; pooling keeps the ratio total when single
    // instances have zero regret.
    double regret_over_weighted = 0;
    double regret_total_weighted = 0;
    std::array<Heatmap, 5> heatmaps;

    std::optional<double> error_ratio() const;
};

struct StudyConfig {
    std::uint64_t root_seed = 42;
    int instances_per_setting = 50;
    std::vector<PolicyId> policies{PolicyId::Dpc, PolicyId::Mcts, PolicyId::Myopic};
    std::string out_dir;  // empty: no artifacts written
    int workers = 0;      // 0: hardware concurrency
    bool check_invariants = true;
    // Monte-Carlo path count for the decision-rate fidelity mode; 0 = off.
    long long sample_paths = 0;
    // Restrict to these setting ordinals (empty: all 66). Used by smoke
    // subsets; dominance denominators shrink accordingly.
    std::vector<int> setting_filter;
};

struct PolicyStudyStats {
    int settings = 0;
    int defined_ratio = 0;
    int underestimation_dominant = 0;  // defined E < 0.5
    double dominance_fraction = 0;     // dominant / settings
    double mean_gap = 0;               // mean of per-setting mean gaps
};

struct RateFidelityResult {
    int pairs = 0;
    long long cells = 0;
    long long outliers = 0;
    double allowed_outliers = 0;
    double max_z = 0;
    bool pass = false;
};

struct StudyReport {
    StudyConfig config;
    std::vector<int> ordinals;                 // settings actually run
    std::vector<SettingSummary> summaries;     // ordered by (ordinal, policy)
    std::map<PolicyId, PolicyStudyStats> stats;
    long long invariant_violations = 0;
    std::vector<std::string> violation_samples;  // capped
    std::vector<int> incomplete_settings;
    std::optional<RateFidelityResult> fidelity;  // set when sample_paths > 0
};

// Full pipeline: generate instances, solve the optimal and requested
// policies, compute metrics and invariants, aggregate per setting, and
// emit CSV/JSON/SVG artifacts when an output directory is configured.
// Byte-identical outputs for a fixed config regardless of worker count.
StudyReport run_study(const StudyConfig& config);

void write_study_artifacts(const StudyReport& report, const std::string& out_dir);

// Exact-vs-sampled decision-rate comparison across deterministic
// (instance, policy) pairs. Each cell is checked against a 3-sigma
// binomial bound; the number of cells beyond it must itself stay within
// 3 sigma of its binomial expectation.
RateFidelityResult rate_fidelity_check(std::uint64_t root_seed, int num_pairs, long long num_paths,
                                       std::uint64_t sim_seed);

}  // namespace dmvrp
