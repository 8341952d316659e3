#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "synfwd/errors.hpp"
#include "synfwd/spread_analytics.hpp"
#include "synfwd/synthetic_data.hpp"

using namespace synfwd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Date kT0 = Date::ymd(2019, 1, 1);

OisCurve flat_curve(double df_1y) {
    return OisCurve(kT0, {{Date::ymd(2020, 1, 1), df_1y}, {Date::ymd(2024, 1, 1), std::pow(df_1y, 1826.0 / 365.0)}});
}

std::vector<SpreadObservation> panel(const std::vector<double>& ttm, const std::vector<double>& s) {
    std::vector<SpreadObservation> out;
    for (std::size_t i = 0; i < ttm.size(); ++i) out.push_back({kT0, kT0, ttm[i], s[i], 1.0, 1.0});
    return out;
}

Dataset dataset_from(const SyntheticFiles& files) {
    Dataset d;
    d.chains = parse_option_chains(files.options_csv, "SYNTH");
    for (const auto& set : parse_ois_quote_sets(files.ois_csv)) d.curves.emplace(set.value_date, bootstrap(set));
    return d;
}

} // namespace

TEST_CASE("funding spread from discount factors") {
    const auto unit = OisCurve(kT0, {{Date::ymd(2021, 1, 1), 1.0}});
    const auto at_par = funding_spread(unit.discount(Date::ymd(2020, 1, 1)), unit, kT0, Date::ymd(2020, 1, 1));
    CHECK(at_par.spread == 0.0);

    const auto s34 = funding_spread(0.9966057734548976, unit, kT0, Date::ymd(2020, 1, 1));
    CHECK(s34.ttm == 1.0);
    CHECK(s34.b_ois == 1.0);
    CHECK_THAT(s34.spread / kBasisPoint, WithinAbs(34.0, 1e-9));

    const auto negative = funding_spread(0.999, flat_curve(0.98), kT0, Date::ymd(2020, 1, 1));
    CHECK(negative.spread < 0.0);

    CHECK_THROWS_AS(funding_spread(0.0, unit, kT0, Date::ymd(2020, 1, 1)), InputError);
    CHECK_THROWS_AS(funding_spread(0.99, unit, kT0, kT0), InputError);
    CHECK_THROWS_AS(funding_spread(0.99, unit, kT0, Date::ymd(2022, 1, 1)), InputError);
}

TEST_CASE("spread definition inverts to the implied discount") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ub(0.8, 1.0);
    std::uniform_int_distribution<int> ud(1, 1800);
    const auto curve = flat_curve(0.975);
    for (int i = 0; i < 1000; ++i) {
        const Date t = kT0.add_days(ud(rng));
        const double b = ub(rng);
        const auto o = funding_spread(b, curve, kT0, t);
        CHECK_THAT(o.b_ois * std::exp(-o.spread * o.ttm), WithinRel(b, 1e-14));
    }
}

TEST_CASE("constant panel is a perfect fit") {
    const auto obs = panel({0.2, 0.5, 1.0, 2.0, 3.5}, {0.0034, 0.0034, 0.0034, 0.0034, 0.0034});
    const auto r = fit_spread_panel(obs, kDefaultMinTtm, false);
    CHECK_THAT(r.intercept / kBasisPoint, WithinAbs(34.0, 1e-9));
    CHECK_THAT(r.slope, WithinAbs(0.0, 1e-15));
    CHECK(r.perfect_fit);
    CHECK(r.p_intercept == 0.0);
    CHECK(r.n == 5);
    const auto w = fit_spread_panel(obs, kDefaultMinTtm, true);
    CHECK_THAT(w.intercept / kBasisPoint, WithinAbs(34.0, 1e-9));
    CHECK(w.weighted);
}

TEST_CASE("noiseless linear panel is recovered") {
    std::vector<double> ttm, s;
    for (int i = 1; i <= 40; ++i) {
        ttm.push_back(0.1 * i);
        s.push_back(0.0033 + 0.0001 * ttm.back());
    }
    const auto r = fit_spread_panel(panel(ttm, s), 0.0, false);
    CHECK_THAT(r.intercept, WithinAbs(0.0033, 1e-12));
    CHECK_THAT(r.slope, WithinAbs(0.0001, 1e-12));
    CHECK(r.perfect_fit);
}

TEST_CASE("ttm cut-off is strict") {
    const auto obs = panel({kDefaultMinTtm, 0.2, 0.5, 1.0}, {1.0, 0.003, 0.004, 0.005});
    CHECK(fit_spread_panel(obs, kDefaultMinTtm, false).n == 3);
    CHECK_THROWS_AS(fit_spread_panel(obs, 0.3, false), InputError);
}

TEST_CASE("intercept without slope is the mean spread") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> e(0.0, 0.0005);
    std::vector<double> ttm, s;
    for (int i = 0; i < 101; ++i) {
        ttm.push_back(0.1 + 0.04 * i);
        s.push_back(0.0034 + e(rng));
    }
    double mean = 0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(s.size());
    const auto r = fit_spread_panel(panel(ttm, s), 0.0, false);
    CHECK_THAT(r.intercept_no_slope, WithinAbs(mean, 1e-12));
}

TEST_CASE("p-values are scale free") {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> e(0.0, 1.0);
    std::vector<double> ttm, s, scaled;
    for (int i = 0; i < 60; ++i) {
        ttm.push_back(0.1 + 0.05 * i);
        s.push_back(0.0034 + 0.00005 * ttm.back() + 0.0004 * e(rng));
        scaled.push_back(7.0 * s.back());
    }
    const auto a = fit_spread_panel(panel(ttm, s), 0.0, false);
    const auto b = fit_spread_panel(panel(ttm, scaled), 0.0, false);
    CHECK_THAT(a.p_slope, WithinAbs(b.p_slope, 1e-12));
    CHECK_THAT(a.p_intercept, WithinAbs(b.p_intercept, 1e-12));
    CHECK_THAT(7.0 * a.intercept, WithinRel(b.intercept, 1e-12));
}

TEST_CASE("weighted fit downweights the outlier") {
    std::vector<double> ttm, s;
    std::mt19937_64 rng(23);
    std::normal_distribution<double> e(0.0, 1e-5);
    for (int i = 0; i < 30; ++i) {
        ttm.push_back(0.1 * (i + 1));
        s.push_back(0.0034 + e(rng));
    }
    s[3] = 0.02;
    const auto ols = fit_spread_panel(panel(ttm, s), 0.0, false);
    const auto wls = fit_spread_panel(panel(ttm, s), 0.0, true);
    CHECK(std::abs(wls.intercept - 0.0034) < std::abs(ols.intercept - 0.0034));
    CHECK(std::abs(wls.intercept - 0.0034) < 0.5 * kBasisPoint);
}

TEST_CASE("descriptive statistics") {
    const Date t = Date::ymd(2019, 6, 21);
    auto q = [](int k, const char* c, const char* p) {
        return OptionQuote{Decimal::from_int(k), *Decimal::parse(c), *Decimal::parse(c), *Decimal::parse(p),
                           *Decimal::parse(p)};
    };
    const OptionChain single{"SPX", kT0, {}, {{t, {q(3000, "10", "5")}}}};
    const auto stats = describe_panel({single});
    REQUIRE(stats.size() == 3);
    CHECK(stats[1].quantity == "straddle");
    CHECK(stats[1].summary.mean == 15);
    CHECK(stats[1].summary.median == 15);
    CHECK(stats[1].summary.q05 == 15);
    CHECK(stats[1].summary.q95 == 15);
    CHECK(stats[2].quantity == "forward_plus_strike");
    CHECK(stats[2].summary.mean == 3005);
    CHECK(stats[2].summary.q95 == 3005);

    OptionChain two{"SPX", kT0, {}, {{t, {}}, {t.add_days(91), {}}}};
    for (int i = 0; i < 3; ++i) two.slices[0].quotes.push_back(q(2900 + 50 * i, "10", "5"));
    for (int i = 0; i < 5; ++i) two.slices[1].quotes.push_back(q(2900 + 50 * i, "10", "5"));
    const auto s2 = describe_panel({two});
    CHECK(s2[0].quantity == "n_strikes");
    CHECK(s2[0].summary.mean == 4);
    CHECK(s2[0].summary.median == 4);

    OptionChain other = single;
    other.market_id = "SX5E";
    const auto multi = describe_panel({two, other, single});
    REQUIRE(multi.size() == 6);
    CHECK(multi[0].market == "SPX");
    CHECK(multi[3].market == "SX5E");
    CHECK_THROWS_AS(describe_panel({}), InputError);
}

TEST_CASE("panel estimation skips fits past the curve") {
    SyntheticSpec spec;
    spec.n_dates = 2;
    spec.n_maturities = 6;
    spec.n_strikes = 10;
    spec.noise_sigma = 0.0;
    auto data = dataset_from(generate_synthetic(spec));
    for (auto& [date, curve] : data.curves) {
        curve = OisCurve(curve.value_date(), {curve.pillars().front()});
    }
    const auto est = estimate_panel(data, FilterConfig{}, 2);
    CHECK(est.fits.size() == 12);
    CHECK(est.skipped_beyond_curve + est.spreads.size() == est.fits.size());
    CHECK(est.skipped_beyond_curve > 0);

    data.curves.erase(data.curves.begin());
    CHECK_THROWS_AS(estimate_panel(data, FilterConfig{}, 2), InputError);
}

TEST_CASE("robustness on an exact synthetic panel") {
    SyntheticSpec spec;
    spec.n_dates = 8;
    spec.n_maturities = 12;
    spec.n_strikes = 30;
    spec.noise_sigma = 0.0;
    const auto data = dataset_from(generate_synthetic(spec));
    const auto rep = robustness_suite(data, RobustnessBase{});
    REQUIRE(rep.rows.size() == 34);
    CHECK(rep.rows.front().variant == "base");
    CHECK(rep.rows.back().variant == "iv_min_strikes_1");
    for (const auto& row : rep.rows) {
        INFO(row.variant);
        CHECK_THAT(row.regression.intercept / kBasisPoint, WithinAbs(34.0, 1e-6));
        CHECK_THAT(row.regression.slope / kBasisPoint, WithinAbs(0.0, 1e-6));
    }
    CHECK(rep.max_intercept_deviation_bp < 1e-6);
    CHECK(rep.max_intercept_no_slope_deviation_bp < 1e-6);
}

TEST_CASE("panel estimation does not depend on the worker count") {
    SyntheticSpec spec;
    spec.n_dates = 5;
    spec.n_maturities = 8;
    spec.n_strikes = 20;
    const auto data = dataset_from(generate_synthetic(spec));
    const auto a = estimate_panel(data, FilterConfig{}, 1);
    const auto b = estimate_panel(data, FilterConfig{}, 7);
    REQUIRE(a.spreads.size() == b.spreads.size());
    for (std::size_t i = 0; i < a.spreads.size(); ++i) {
        CHECK(a.spreads[i].spread == b.spreads[i].spread);
        CHECK(a.spreads[i].maturity == b.spreads[i].maturity);
    }
}

TEST_CASE("generator noise keeps every fit tight") {
    SyntheticSpec spec;
    spec.n_dates = 4;
    spec.n_strikes = 100;
    spec.noise_sigma = 0.01;
    spec.seed = 3;
    const auto data = dataset_from(generate_synthetic(spec));
    const auto est = estimate_fits(data.chains, FilterConfig{});
    REQUIRE(est.fits.size() == 48);
    for (const auto& f : est.fits) CHECK(f.fit.r_squared > 0.9995);
}

TEST_CASE("generator quotes obey parity before noise") {
    SyntheticSpec spec;
    spec.n_dates = 2;
    spec.n_strikes = 15;
    spec.noise_sigma = 0.0;
    spec.spread = 0.0050;
    const auto data = dataset_from(generate_synthetic(spec));
    const auto est = estimate_panel(data, FilterConfig{});
    REQUIRE_FALSE(est.spreads.empty());
    for (const auto& o : est.spreads) CHECK_THAT(o.spread, WithinAbs(0.0050, 1e-9));
}
