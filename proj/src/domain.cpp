#include "dmvrp/domain.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"

namespace dmvrp {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

std::string_view label(LocationDist d) {
    switch (d) {
        case LocationDist::Unif: return "unif";
        case LocationDist::Clust: return "clust";
        case LocationDist::ClustSort: return "clust_sort";
    }
    throw std::logic_error("bad LocationDist");
}

std::string_view label(RevenueDist d) {
    switch (d) {
        case RevenueDist::Homog: return "homog";
        case RevenueDist::Rand: return "rand";
        case RevenueDist::LbH: return "l-b-h";
        case RevenueDist::HbL: return "h-b-l";
    }
    throw std::logic_error("bad RevenueDist");
}

std::string_view label(Profitability p) {
    switch (p) {
        case Profitability::High: return "high";
        case Profitability::Med: return "med";
        case Profitability::Low: return "low";
    }
    throw std::logic_error("bad Profitability");
}

std::string_view label(ConstraintType c) {
    switch (c) {
        case ConstraintType::Load: return "load";
        case ConstraintType::Dist: return "dist";
    }
    throw std::logic_error("bad ConstraintType");
}

std::string_view label(TableKind k) {
    switch (k) {
        case TableKind::Optimal: return "optimal";
        case TableKind::DpcR: return "dpc";
        case TableKind::MctsF: return "mcts";
        case TableKind::RevenueShare: return "revenue_share";
        case TableKind::CostShare: return "cost_share";
        case TableKind::PolicyValue: return "policy_value";
    }
    throw std::logic_error("bad TableKind");
}

LocationDist parse_location_dist(std::string_view s) {
    if (s == "unif") return LocationDist::Unif;
    if (s == "clust") return LocationDist::Clust;
    if (s == "clust_sort") return LocationDist::ClustSort;
    throw std::invalid_argument("unknown location distribution: " + std::string(s));
}

RevenueDist parse_revenue_dist(std::string_view s) {
    if (s == "homog") return RevenueDist::Homog;
    if (s == "rand") return RevenueDist::Rand;
    if (s == "l-b-h" || s == "lbh") return RevenueDist::LbH;
    if (s == "h-b-l" || s == "hbl") return RevenueDist::HbL;
    throw std::invalid_argument("unknown revenue distribution: " + std::string(s));
}

Profitability parse_profitability(std::string_view s) {
    if (s == "high") return Profitability::High;
    if (s == "med") return Profitability::Med;
    if (s == "low") return Profitability::Low;
    throw std::invalid_argument("unknown profitability: " + std::string(s));
}

ConstraintType parse_constraint(std::string_view s) {
    if (s == "load") return ConstraintType::Load;
    if (s == "dist") return ConstraintType::Dist;
    throw std::invalid_argument("unknown constraint type: " + std::string(s));
}

double Setting::cost_factor() const {
    switch (prof) {
        case Profitability::High: return 0.2;
        case Profitability::Med: return 0.6;
        case Profitability::Low: return 1.0;
    }
    throw std::logic_error("bad Profitability");
}

bool Setting::valid() const {
    if (loc == LocationDist::ClustSort && rev == RevenueDist::Homog) return false;
    return horizon >= 1;
}

std::string Setting::caption() const {
    std::string out;
    out += label(prof);
    out += " | ";
    out += label(cons);
    out += " | ";
    out += label(loc);
    out += " | ";
    out += label(rev);
    return out;
}

std::string OrderSet::bitstring(int horizon) const {
    std::string s(static_cast<std::size_t>(horizon), '0');
    for (int c = 1; c <= horizon; ++c)
        if (contains(c)) s[static_cast<std::size_t>(c) - 1] = '1';
    return s;
}

ValueTable::ValueTable(TableKind kind, int horizon) : kind_(kind), horizon_(horizon) {
    if (horizon < 0 || horizon > 20) throw std::invalid_argument("horizon out of range");
    values_.assign(static_cast<std::size_t>(horizon) + 1,
                   std::vector<double>(std::size_t(1) << horizon, kNan));
}

bool ValueTable::has(int epoch, OrderSet s) const {
    return !std::isnan(values_.at(static_cast<std::size_t>(epoch))[s.bits]);
}

double ValueTable::at(int epoch, OrderSet s) const {
    double v = values_.at(static_cast<std::size_t>(epoch))[s.bits];
    if (std::isnan(v)) throw std::out_of_range("value table miss: epoch " + std::to_string(epoch) + " mask " + std::to_string(s.bits));
    return v;
}

void ValueTable::set(int epoch, OrderSet s, double value) {
    values_.at(static_cast<std::size_t>(epoch))[s.bits] = value;
}

std::vector<OrderSet> ValueTable::states(int epoch) const {
    std::vector<OrderSet> out;
    const auto& row = values_.at(static_cast<std::size_t>(epoch));
    for (std::uint32_t m = 0; m < row.size(); ++m)
        if (!std::isnan(row[m])) out.push_back(OrderSet{m});
    return out;
}

std::vector<Setting> enumerate_settings() {
    std::vector<Setting> out;
    out.reserve(66);
    for (LocationDist loc : {LocationDist::Unif, LocationDist::Clust, LocationDist::ClustSort})
        for (RevenueDist rev : {RevenueDist::Homog, RevenueDist::Rand, RevenueDist::LbH, RevenueDist::HbL}) {
            if (loc == LocationDist::ClustSort && rev == RevenueDist::Homog) continue;
            for (Profitability prof : {Profitability::High, Profitability::Med, Profitability::Low})
                for (ConstraintType cons : {ConstraintType::Load, ConstraintType::Dist})
                    out.push_back(Setting{loc, rev, prof, cons, kStudyHorizon});
        }
    return out;
}

int setting_ordinal(const Setting& s) {
    if (!s.valid() || s.horizon != kStudyHorizon)
        throw std::invalid_argument("setting is not part of the study catalogue");
    int customer_rank = 0;
    switch (s.loc) {
        case LocationDist::Unif: customer_rank = static_cast<int>(s.rev); break;
        case LocationDist::Clust: customer_rank = 4 + static_cast<int>(s.rev); break;
        case LocationDist::ClustSort: customer_rank = 8 + static_cast<int>(s.rev) - 1; break;
    }
    return customer_rank * 6 + static_cast<int>(s.prof) * 2 + static_cast<int>(s.cons);
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_json(const Instance& inst) {
    std::string out = "{\"setting\":{\"loc\":\"";
    out += label(inst.setting.loc);
    out += "\",\"rev\":\"";
    out += label(inst.setting.rev);
    out += "\",\"prof\":\"";
    out += label(inst.setting.prof);
    out += "\",\"cons\":\"";
    out += label(inst.setting.cons);
    out += "\"},\"seed\":";
    out += std::to_string(inst.seed);
    out += ",\"instance_id\":";
    out += std::to_string(inst.instance_id);
    out += ",\"customers\":[";
    for (std::size_t i = 0; i < inst.customers.size(); ++i) {
        const Customer& c = inst.customers[i];
        if (i) out += ',';
        out += "{\"index\":";
        out += std::to_string(c.index);
        out += ",\"location\":";
        out += format_real(c.location);
        out += ",\"revenue\":";
        out += format_real(c.revenue);
        out += '}';
    }
    out += "]}";
    return out;
}

Instance instance_from_json(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Instance inst;
    const auto& s = j.at("setting");
    inst.setting.loc = parse_location_dist(s.at("loc").get<std::string>());
    inst.setting.rev = parse_revenue_dist(s.at("rev").get<std::string>());
    inst.setting.prof = parse_profitability(s.at("prof").get<std::string>());
    inst.setting.cons = parse_constraint(s.at("cons").get<std::string>());
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.instance_id = j.at("instance_id").get<int>();
    for (const auto& cj : j.at("customers")) {
        Customer c;
        c.index = cj.at("index").get<int>();
        c.location = cj.at("location").get<double>();
        c.revenue = cj.at("revenue").get<double>();
        inst.customers.push_back(c);
    }
    inst.setting.horizon = inst.horizon();
    return inst;
}

}  // namespace dmvrp
