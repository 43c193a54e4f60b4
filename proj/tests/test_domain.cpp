#include <algorithm>
#include <set>
#include <tuple>

#include "doctest.h"
#include "dmvrp/domain.hpp"
#include "dmvrp/instgen.hpp"

using namespace dmvrp;

TEST_CASE("setting catalogue has the 66 canonical entries") {
    const auto settings = enumerate_settings();
    CHECK(settings.size() == 66);

    std::set<std::tuple<int, int, int, int>> seen;
    for (const Setting& s : settings) {
        CHECK(s.valid());
        seen.insert({static_cast<int>(s.loc), static_cast<int>(s.rev), static_cast<int>(s.prof),
                     static_cast<int>(s.cons)});
    }
    CHECK(seen.size() == 66);  // duplicate-free

    // Lexicographic in (loc, rev, prof, cons).
    CHECK(std::is_sorted(seen.begin(), seen.end()));
    for (std::size_t i = 0; i < settings.size(); ++i)
        CHECK(setting_ordinal(settings[i]) == static_cast<int>(i));

    const Setting present{LocationDist::Unif, RevenueDist::Homog, Profitability::High, ConstraintType::Load};
    CHECK(std::count(settings.begin(), settings.end(), present) == 1);
    for (const Setting& s : settings)
        CHECK(!(s.loc == LocationDist::ClustSort && s.rev == RevenueDist::Homog));

    std::set<std::pair<int, int>> customer_settings;
    for (const Setting& s : settings)
        customer_settings.insert({static_cast<int>(s.loc), static_cast<int>(s.rev)});
    CHECK(customer_settings.size() == 11);
}

TEST_CASE("invalid settings are rejected") {
    Setting bad{LocationDist::ClustSort, RevenueDist::Homog, Profitability::Med, ConstraintType::Load};
    CHECK(!bad.valid());
    CHECK_THROWS_AS(setting_ordinal(bad), std::invalid_argument);
}

TEST_CASE("caption follows the prof | cons | loc | rev layout") {
    Setting s{LocationDist::Unif, RevenueDist::Homog, Profitability::Med, ConstraintType::Load};
    CHECK(s.caption() == "med | load | unif | homog");
    Setting t{LocationDist::ClustSort, RevenueDist::LbH, Profitability::Low, ConstraintType::Dist};
    CHECK(t.caption() == "low | dist | clust_sort | l-b-h");
}

TEST_CASE("order sets index customers from one") {
    OrderSet s;
    CHECK(s.empty());
    s = s.with(1).with(3);
    CHECK(s.contains(1));
    CHECK(!s.contains(2));
    CHECK(s.size() == 2);
    CHECK(s.bitstring(10) == "1010000000");
}

TEST_CASE("value table stores per-epoch entries") {
    ValueTable table(TableKind::Optimal, 3);
    CHECK(!table.has(1, OrderSet{}));
    table.set(1, OrderSet{}, 2.5);
    CHECK(table.at(1, OrderSet{}) == 2.5);
    CHECK_THROWS_AS(table.at(2, OrderSet{}), std::out_of_range);
    table.set(1, OrderSet{}.with(1), -1.0);
    CHECK(table.states(1).size() == 2);
}

TEST_CASE("instance json round-trips bit for bit") {
    const Setting setting = enumerate_settings()[37];
    const Instance inst = generate_instance(42, setting, 7);
    const std::string text = to_json(inst);
    const Instance back = instance_from_json(text);
    CHECK(back.setting == inst.setting);
    CHECK(back.seed == inst.seed);
    CHECK(back.instance_id == inst.instance_id);
    REQUIRE(back.customers.size() == inst.customers.size());
    for (std::size_t i = 0; i < inst.customers.size(); ++i) {
        CHECK(back.customers[i].index == inst.customers[i].index);
        CHECK(back.customers[i].location == inst.customers[i].location);
        CHECK(back.customers[i].revenue == inst.customers[i].revenue);
    }
    CHECK(to_json(back) == text);
}
