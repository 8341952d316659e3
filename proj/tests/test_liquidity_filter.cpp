#include <catch_amalgamated.hpp>

#include "synfwd/errors.hpp"
#include "synfwd/liquidity_filter.hpp"
#include "test_support.hpp"

using namespace synfwd;

namespace {

Decimal dec(const char* s) { return *Decimal::parse(s); }

OptionQuote quote(int strike, const char* cb, const char* ca, const char* pb, const char* pa) {
    OptionQuote q;
    q.strike = Decimal::from_int(strike);
    q.call_bid = dec(cb);
    q.call_ask = dec(ca);
    q.put_bid = dec(pb);
    q.put_ask = dec(pa);
    return q;
}

OptionChain chain_of(std::vector<OptionQuote> quotes) {
    return {"T", Date::ymd(2019, 1, 2), {}, {{Date::ymd(2019, 6, 21), std::move(quotes)}}};
}

} // namespace

TEST_CASE("penny rule uses the mid price") {
    const FilterConfig cfg;
    CHECK(screen_quote(quote(2800, "0.04", "0.06", "10", "11"), cfg) == DiscardReason::penny);
    CHECK(screen_quote(quote(2800, "10", "11", "0", "0.1"), cfg) == DiscardReason::penny);
    CHECK_FALSE(screen_quote(quote(2800, "0.08", "0.12", "10", "11"), cfg));
    CHECK_FALSE(screen_quote(quote(2800, "0.1", "0.1", "10", "11"), cfg));
}

TEST_CASE("ratio boundary is kept") {
    const FilterConfig cfg;
    CHECK_FALSE(screen_quote(quote(2800, "4", "10", "10", "11"), cfg));
    CHECK(screen_quote(quote(2800, "3.99", "10", "10", "11"), cfg) == DiscardReason::wide_spread);
    CHECK(screen_quote(quote(2800, "10", "11", "3.99", "10"), cfg) == DiscardReason::wide_spread);
}

TEST_CASE("rule precedence") {
    FilterConfig cfg;
    auto q = quote(2800, "0.01", "0.02", "1", "10");
    CHECK(screen_quote(q, cfg) == DiscardReason::penny);
    q.put_ask.reset();
    CHECK(screen_quote(q, cfg) == DiscardReason::missing_side);

    cfg.penny_threshold = Decimal{};
    CHECK(screen_quote(quote(2800, "0", "0", "1", "1"), cfg) == DiscardReason::wide_spread);
}

TEST_CASE("thin maturities are dropped") {
    const FilterConfig cfg;
    const auto two = filter_chain(chain_of({quote(2700, "1", "1.1", "1", "1.1"), quote(2800, "1", "1.1", "1", "1.1")}), cfg);
    CHECK(two.chain.slices.empty());
    REQUIRE(two.report.maturities.size() == 1);
    CHECK(two.report.maturities[0].maturity_dropped == 2);
    CHECK(two.report.maturities[0].kept == 0);

    const auto three = filter_chain(chain_of({quote(2700, "1", "1.1", "1", "1.1"), quote(2800, "1", "1.1", "1", "1.1"),
                                              quote(2900, "1", "1.1", "1", "1.1")}),
                                    cfg);
    REQUIRE(three.chain.slices.size() == 1);
    CHECK(three.chain.slices[0].quotes.size() == 3);
    CHECK(three.report.maturities[0].kept == 3);
}

TEST_CASE("report counts every quote once") {
    FilterConfig cfg;
    cfg.min_strikes_per_maturity = 1;
    auto missing = quote(2600, "1", "1.1", "1", "1.1");
    missing.call_bid.reset();
    const auto res = filter_chain(chain_of({missing, quote(2700, "0.01", "0.02", "1", "1.1"),
                                            quote(2800, "1", "5", "1", "1.1"), quote(2900, "1", "1.1", "1", "1.1")}),
                                  cfg);
    const auto& c = res.report.maturities.at(0);
    CHECK(c.input == 4);
    CHECK(c.missing_side == 1);
    CHECK(c.penny == 1);
    CHECK(c.wide_spread == 1);
    CHECK(c.kept == 1);
    CHECK(c.kept + c.discarded() == c.input);
}

TEST_CASE("config validation") {
    FilterConfig cfg;
    cfg.max_bid_ask_ratio = Decimal{};
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.penny_threshold = dec("-0.1");
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.min_strikes_per_maturity = 0;
    CHECK_THROWS_AS(filter_chain(chain_of({}), cfg), InputError);
}

TEST_CASE("filter properties on random chains") {
    std::mt19937_64 rng(99);
    const std::vector<const char*> pennies = {"0", "0.05", "0.1", "0.5", "1"};
    const std::vector<const char*> ratios = {"0.3", "0.6", "0.9", "1"};
    for (int i = 0; i < 1000; ++i) {
        const auto chain = testing::random_chain(rng);
        FilterConfig cfg;
        cfg.min_strikes_per_maturity = 1 + i % 3;
        const auto once = filter_chain(chain, cfg);
        const auto twice = filter_chain(once.chain, cfg);
        CHECK(twice.chain == once.chain);

        for (const auto& c : once.report.maturities) CHECK(c.kept + c.discarded() == c.input);

        for (std::size_t p = 1; p < pennies.size(); ++p) {
            FilterConfig lo = cfg, hi = cfg;
            lo.penny_threshold = dec(pennies[p - 1]);
            hi.penny_threshold = dec(pennies[p]);
            CHECK(testing::is_subset(filter_chain(chain, hi).chain, filter_chain(chain, lo).chain));
        }
        for (std::size_t r = 1; r < ratios.size(); ++r) {
            FilterConfig tight = cfg, loose = cfg;
            tight.max_bid_ask_ratio = dec(ratios[r - 1]);
            loose.max_bid_ask_ratio = dec(ratios[r]);
            CHECK(testing::is_subset(filter_chain(chain, tight).chain, filter_chain(chain, loose).chain));
        }
    }
}
