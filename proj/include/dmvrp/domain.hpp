#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Core domain model: the 66-setting catalogue, customer streams, order-set
// states and per-epoch value tables shared by every solver and metric.
namespace dmvrp {

inline constexpr int kStudyHorizon = 10;
inline constexpr double kSegmentMin = -25.0;
inline constexpr double kSegmentMax = 25.0;
inline constexpr double kRevenueLow = 15.0;
inline constexpr double kRevenueHigh = 25.0;
inline constexpr int kLoadCapacity = 3;
inline constexpr double kRouteLimit = 50.0;
inline constexpr double kArrivalProb = 0.5;
// Accept-on-tie comparison slack, applied identically by every policy.
inline constexpr double kDecisionEps = 1e-9;

enum class LocationDist { Unif, Clust, ClustSort };
enum class RevenueDist { Homog, Rand, LbH, HbL };
enum class Profitability { High, Med, Low };
enum class ConstraintType { Load, Dist };

std::string_view label(LocationDist d);
std::string_view label(RevenueDist d);
std::string_view label(Profitability p);
std::string_view label(ConstraintType c);

LocationDist parse_location_dist(std::string_view s);
RevenueDist parse_revenue_dist(std::string_view s);
Profitability parse_profitability(std::string_view s);
ConstraintType parse_constraint(std::string_view s);

struct Setting {
    LocationDist loc = LocationDist::Unif;
    RevenueDist rev = RevenueDist::Homog;
    Profitability prof = Profitability::High;
    ConstraintType cons = ConstraintType::Load;
    int horizon = kStudyHorizon;

    double cost_factor() const;
    int load_capacity() const { return kLoadCapacity; }
    double route_limit() const { return kRouteLimit; }
    bool valid() const;
    // Display label in "prof | cons | loc | rev" order, e.g. "med | load | unif | homog".
    std::string caption() const;

    friend bool operator==(const Setting&, const Setting&) = default;
};

struct Customer {
    int index = 0;        // 1..T; doubles as the arrival epoch
    double location = 0;  // on [-25, 25], depot at 0
    double revenue = 0;
};

struct Instance {
    Setting setting;
    std::vector<Customer> customers;  // ordered by arrival index
    int instance_id = 0;
    std::uint64_t seed = 0;

    int horizon() const { return static_cast<int>(customers.size()); }
    const Customer& customer(int c) const { return customers.at(static_cast<std::size_t>(c) - 1); }
};

// Post-decision state: the set of accepted customers, one bit per index.
struct OrderSet {
    std::uint32_t bits = 0;

    bool contains(int customer) const { return (bits >> (customer - 1)) & 1u; }
    OrderSet with(int customer) const { return OrderSet{bits | (1u << (customer - 1))}; }
    int size() const { return std::popcount(bits); }
    bool empty() const { return bits == 0; }
    // Leftmost character is customer 1.
    std::string bitstring(int horizon) const;

    auto operator<=>(const OrderSet&) const = default;
};

enum class TableKind { Optimal, DpcR, MctsF, RevenueShare, CostShare, PolicyValue };
std::string_view label(TableKind k);

// Per-epoch map OrderSet -> value, epochs 0..T. Entries exist only for the
// states a solver filled; reading an absent entry throws.
class ValueTable {
public:
    ValueTable(TableKind kind, int horizon);

    TableKind kind() const { return kind_; }
    int horizon() const { return horizon_; }

    bool has(int epoch, OrderSet s) const;
    double at(int epoch, OrderSet s) const;
    void set(int epoch, OrderSet s, double value);
    std::vector<OrderSet> states(int epoch) const;  // ascending mask order

private:
    TableKind kind_;
    int horizon_;
    std::vector<std::vector<double>> values_;  // [epoch][mask], NaN = absent
};

// All 66 valid settings in canonical (loc, rev, prof, cons) lexicographic order.
std::vector<Setting> enumerate_settings();
// Index of a study setting in the canonical order; throws on invalid or
// non-catalogue settings (e.g. horizon != 10).
int setting_ordinal(const Setting& s);

// %.17g rendering used everywhere a real lands in a text artifact.
std::string format_real(double v);

// Canonical single-line JSON form; reals carry 17 significant digits.
std::string to_json(const Instance& inst);
Instance instance_from_json(std::string_view text);

}  // namespace dmvrp
