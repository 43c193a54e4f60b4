#include "dmvrp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dmvrp/aggregate.hpp"
#include "dmvrp/instgen.hpp"

namespace dmvrp {

RateTable decision_rates(const DecisionRule& rule, const Instance& inst, const TourOracle& oracle) {
    const int T = inst.horizon();
    RateTable rates(static_cast<std::size_t>(T) + 1);
    std::map<std::uint32_t, double> mass{{0u, 1.0}};
    for (int t = 1; t <= T; ++t) {
        std::map<std::uint32_t, double> next;
        for (const auto& [bits, m] : mass) {
            rates[static_cast<std::size_t>(t)][bits] += kArrivalProb * m;
            const OrderSet state{bits};
            next[bits] += (1.0 - kArrivalProb) * m;  // no arrival
            if (rule.decide(t, state))
                next[state.with(t).bits] += kArrivalProb * m;
            else
                next[bits] += kArrivalProb * m;
        }
        mass = std::move(next);
        (void)oracle;
    }
    return rates;
}

RateTable sampled_decision_rates(const DecisionRule& rule, const Instance& inst,
                                 const TourOracle& oracle, long long num_paths, std::uint64_t seed) {
    const int T = inst.horizon();
    RateTable rates(static_cast<std::size_t>(T) + 1);
    StreamRng rng(seed);
    for (long long p = 0; p < num_paths; ++p) {
        OrderSet state;
        for (int t = 1; t <= T; ++t) {
            if (rng.next_unit() < kArrivalProb) {
                rates[static_cast<std::size_t>(t)][state.bits] += 1.0;
                if (rule.decide(t, state)) state = state.with(t);
            }
        }
    }
    for (auto& epoch : rates)
        for (auto& [bits, v] : epoch) v /= static_cast<double>(num_paths);
    (void)oracle;
    return rates;
}

std::vector<MetricRecord> compute_errors(const PolicySolution& optimal, const DecisionRule& approx,
                                         const Instance& inst, const TourOracle& oracle) {
    const RateTable approx_rates = decision_rates(approx, inst, oracle);
    const DecisionRule optimal_rule = as_rule(optimal);
    const RateTable optimal_rates = decision_rates(optimal_rule, inst, oracle);

    std::vector<MetricRecord> records;
    const int T = inst.horizon();
    for (int t = 1; t <= T; ++t) {
        const auto& ar = approx_rates[static_cast<std::size_t>(t)];
        const auto& orx = optimal_rates[static_cast<std::size_t>(t)];
        std::vector<std::uint32_t> masks;
        masks.reserve(ar.size() + orx.size());
        for (const auto& [bits, p] : ar) masks.push_back(bits);
        for (const auto& [bits, p] : orx) masks.push_back(bits);
        std::sort(masks.begin(), masks.end());
        masks.erase(std::unique(masks.begin(), masks.end()), masks.end());

        const double revenue = inst.customer(t).revenue;
        for (std::uint32_t bits : masks) {
            const OrderSet state{bits};
            MetricRecord rec;
            rec.epoch = t;
            rec.state = state;
            rec.capacity_pct = capacity_pct(state, inst, oracle);
            if (auto it = ar.find(bits); it != ar.end()) rec.rate = it->second;
            rec.has_decision = oracle.feasible(state.with(t));
            if (rec.has_decision) {
                const double true_oc = optimal.oc_at(t, state);
                const double approx_oc = approx.oc(t, state);
                rec.g_opt = optimal.decide(t, state);
                rec.g_approx = approx.decide(t, state);
                rec.signed_error = approx_oc - true_oc;
                rec.e_over = std::max(rec.signed_error, 0.0);
                rec.e_under = std::max(-rec.signed_error, 0.0);
                const double margin = revenue - true_oc;
                rec.regret = (rec.g_opt ? margin : 0.0) - (rec.g_approx ? margin : 0.0);
                rec.regret_over = rec.e_over > 0.0 ? rec.regret : 0.0;
                rec.regret_under = rec.e_under > 0.0 ? rec.regret : 0.0;
            }
            records.push_back(rec);
        }
    }
    return records;
}

std::optional<double> weighted_error_ratio(std::span<const MetricRecord> records) {
    double over = 0.0, total = 0.0;
    for (const MetricRecord& rec : records) {
        over += rec.regret_over * rec.rate;
        total += (rec.regret_over + rec.regret_under) * rec.rate;
    }
    if (total == 0.0) return std::nullopt;
    return over / total;
}

double optimality_gap(double j_star, double j_pi) {
    return (j_star - j_pi) / std::max(std::abs(j_star), 1e-6);
}

void write_metrics_header(std::ostream& os) {
    os << "policy,t,mask,capacity_pct,signed_error,e_over,e_under,regret,regret_over,regret_under,P\n";
}

void write_metrics_rows(std::ostream& os, std::string_view policy,
                        std::span<const MetricRecord> records, int horizon) {
    for (const MetricRecord& rec : records) {
        os << policy << ',' << rec.epoch << ',' << rec.state.bitstring(horizon) << ','
           << format_real(rec.capacity_pct) << ',';
        if (rec.has_decision) {
            os << format_real(rec.signed_error) << ',' << format_real(rec.e_over) << ','
               << format_real(rec.e_under) << ',' << format_real(rec.regret) << ','
               << format_real(rec.regret_over) << ',' << format_real(rec.regret_under);
        } else {
            os << ",,,,,";
        }
        os << ',' << format_real(rec.rate) << '\n';
    }
}

void write_metrics_csv(std::ostream& os, std::string_view policy,
                       std::span<const MetricRecord> records, int horizon) {
    write_metrics_header(os);
    write_metrics_rows(os, policy, records, horizon);
}

}  // namespace dmvrp
