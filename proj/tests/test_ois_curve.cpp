#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "synfwd/errors.hpp"
#include "synfwd/ois_curve.hpp"

using namespace synfwd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

OisQuoteSet quotes(Date t0, std::vector<std::pair<int, const char*>> rates) {
    OisQuoteSet set{"USD", t0, {}};
    for (const auto& [m, r] : rates) set.quotes.push_back({Tenor{m}, *Decimal::parse(r)});
    return set;
}

const std::vector<int> kAllTenors = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 15, 18, 21, 24, 36, 48, 60};

} // namespace

TEST_CASE("fixed leg schedule") {
    const Date t0 = Date::ymd(2019, 1, 31);
    CHECK(ois_fixed_leg_schedule(t0, Tenor{6}) == std::vector<Date>{Date::ymd(2019, 7, 31)});
    CHECK(ois_fixed_leg_schedule(t0, Tenor{1}) == std::vector<Date>{Date::ymd(2019, 2, 28)});
    CHECK(ois_fixed_leg_schedule(t0, Tenor{18}) ==
          std::vector<Date>{Date::ymd(2019, 7, 31), Date::ymd(2020, 7, 31)});
    CHECK(ois_fixed_leg_schedule(t0, Tenor{24}) ==
          std::vector<Date>{Date::ymd(2020, 1, 31), Date::ymd(2021, 1, 31)});
}

TEST_CASE("zero rates give unit discounts") {
    std::vector<std::pair<int, const char*>> r;
    for (int m : kAllTenors) r.emplace_back(m, "0");
    const auto curve = bootstrap(quotes(Date::ymd(2019, 3, 15), r));
    for (const auto& p : curve.pillars()) CHECK(p.discount == 1.0);
    for (int d = 0; d <= 1800; d += 7) CHECK(curve.discount(Date::ymd(2019, 3, 15).add_days(d)) == 1.0);
}

TEST_CASE("single payment pillar") {
    const auto curve = bootstrap(quotes(Date::ymd(2019, 1, 2), {{12, "0.02"}}));
    REQUIRE(curve.pillars().size() == 1);
    CHECK(curve.pillars()[0].date == Date::ymd(2020, 1, 2));
    CHECK_THAT(curve.pillars()[0].discount, WithinRel(0.9801252382248842, 1e-15));
}

TEST_CASE("annual leg recursion") {
    const auto curve = bootstrap(quotes(Date::ymd(2019, 1, 2), {{12, "0.02"}, {24, "0.02"}}));
    CHECK_THAT(curve.pillars()[0].discount, WithinRel(0.98012523822488418, 1e-15));
    CHECK_THAT(curve.pillars()[1].discount, WithinRel(0.96059317696003033, 1e-14));
}

TEST_CASE("gap between pillars is solved to the fixed point") {
    // 2Y coupon date is interpolated between the 1Y and 3Y pillars; oracle from a bisection solve
    const auto curve = bootstrap(quotes(Date::ymd(2019, 1, 2), {{12, "0.02"}, {36, "0.025"}}));
    CHECK_THAT(curve.pillars()[1].discount, WithinRel(0.92741757066167074, 1e-13));
}

TEST_CASE("log-linear interpolation") {
    const Date t0 = Date::ymd(2019, 1, 1);
    const OisCurve curve(t0, {{Date::ymd(2020, 1, 1), 0.98}, {Date::ymd(2021, 1, 1), 0.96}});
    CHECK(curve.discount(t0) == 1.0);
    CHECK(curve.discount(Date::ymd(2020, 1, 1)) == 0.98);
    CHECK(curve.discount(Date::ymd(2021, 1, 1)) == 0.96);
    CHECK_THAT(curve.discount(Date::ymd(2020, 7, 2)), WithinRel(0.9699484522385713, 1e-15));
    // before the first pillar: anchored at (t0, 1)
    CHECK_THAT(curve.discount(Date::ymd(2019, 7, 2)), WithinRel(std::pow(0.98, 182.0 / 365.0), 1e-14));
    CHECK_THROWS_AS(curve.discount(Date::ymd(2021, 1, 2)), InputError);
    CHECK_THROWS_AS(curve.discount(Date::ymd(2018, 12, 31)), InputError);
}

TEST_CASE("curve construction rejects bad pillars") {
    const Date t0 = Date::ymd(2019, 1, 1);
    CHECK_THROWS_AS(OisCurve(t0, {}), InputError);
    CHECK_THROWS_AS(OisCurve(t0, {{t0, 1.0}}), InputError);
    CHECK_THROWS_AS(OisCurve(t0, {{Date::ymd(2020, 1, 1), -0.1}}), InputError);
}

TEST_CASE("par rates round trip on jagged curves") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> level(-0.005, 0.06);
    std::uniform_real_distribution<double> bump(-0.002, 0.002);
    for (int it = 0; it < 50; ++it) {
        const Date t0 = Date::ymd(2018, 1, 1).add_days(37 * it);
        OisQuoteSet set{"USD", t0, {}};
        const double base = level(rng);
        for (int m : kAllTenors) {
            set.quotes.push_back({Tenor{m}, Decimal::from_units(std::llround((base + bump(rng)) * 1e6), 6)});
        }
        const auto curve = bootstrap(set);
        for (const auto& q : set.quotes) {
            CHECK_THAT(ois_par_rate(curve, q.tenor), WithinAbs(q.rate.to_double(), 1e-12));
        }
    }
}

TEST_CASE("positive non-decreasing par rates give a decreasing curve") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> level(0.0001, 0.06);
    std::uniform_real_distribution<double> step(0.0, 0.0005);
    for (int it = 0; it < 50; ++it) {
        const Date t0 = Date::ymd(2018, 1, 1).add_days(37 * it);
        OisQuoteSet set{"USD", t0, {}};
        double r = level(rng);
        for (int m : kAllTenors) {
            if (it % 5 != 0) r += step(rng); // every fifth curve is flat
            set.quotes.push_back({Tenor{m}, Decimal::from_units(std::llround(r * 1e6), 6)});
        }
        const auto curve = bootstrap(set);
        double prev = 1.0;
        for (int d = 1; t0.add_days(d) <= curve.last_date(); d += 5) {
            const double df = curve.discount(t0.add_days(d));
            CHECK(df < prev);
            prev = df;
        }
    }
}

TEST_CASE("arbitrage-violating quotes name the pillar") {
    using Catch::Matchers::ContainsSubstring;
    CHECK_THROWS_WITH(bootstrap(quotes(Date::ymd(2019, 1, 2), {{6, "0.02"}, {12, "-0.8"}})),
                      ContainsSubstring("12M"));
    CHECK_THROWS_WITH(bootstrap(quotes(Date::ymd(2019, 1, 2), {{12, "0.02"}, {24, "5"}})),
                      ContainsSubstring("2Y"));
    CHECK_THROWS_AS(bootstrap(quotes(Date::ymd(2019, 1, 2), {})), InputError);
}

TEST_CASE("curve dump") {
    const auto curve = bootstrap(quotes(Date::ymd(2019, 1, 2), {{12, "0"}}));
    CHECK(serialize_curve(curve) == "date,discount\n2020-01-02,1\n");
}
