#pragma once

#include <optional>
#include <string>
#include <vector>

#include "synfwd/decimal.hpp"
#include "synfwd/errors.hpp"
#include "synfwd/market_data.hpp"

namespace synfwd {

struct FilterConfig {
    Decimal penny_threshold = Decimal::from_units(1, 1);   // 0.1 index points
    Decimal max_bid_ask_ratio = Decimal::from_units(6, 1); // 60%
    int min_strikes_per_maturity = 3;

    void validate() const {
        if (penny_threshold.is_negative()) throw InputError("penny threshold must be >= 0");
        if (max_bid_ask_ratio <= Decimal{} || max_bid_ask_ratio > Decimal::from_int(1)) {
            throw InputError("max bid-ask ratio must lie in (0, 1]");
        }
        if (min_strikes_per_maturity < 1) throw InputError("min strikes per maturity must be >= 1");
    }
};

/// Rules are checked in this order; a quote is attributed to the first one it fails.
enum class DiscardReason { missing_side, penny, wide_spread };

struct MaturityFilterCounts {
    Date maturity;
    std::size_t input = 0;
    std::size_t kept = 0;
    std::size_t missing_side = 0;
    std::size_t penny = 0;
    std::size_t wide_spread = 0;
    std::size_t maturity_dropped = 0; // passed the quote rules, removed with a too-thin slice

    [[nodiscard]] std::size_t discarded() const { return missing_side + penny + wide_spread + maturity_dropped; }

    friend bool operator==(const MaturityFilterCounts&, const MaturityFilterCounts&) = default;
};

struct FilterReport {
    Date value_date;
    std::vector<MaturityFilterCounts> maturities;
};

struct FilterResult {
    OptionChain chain;
    FilterReport report;
};

namespace detail {

inline bool is_penny(const Decimal& bid, const Decimal& ask, const Decimal& threshold) {
    return (bid + ask).half() < threshold;
}

// (ask - bid) / ask > ratio, evaluated as (ask - bid) > ratio * ask. A zero ask is always wide.
inline bool is_wide(const Decimal& bid, const Decimal& ask, const Decimal& ratio) {
    if (ask.is_zero()) return true;
    return compare_product(ratio, ask, ask - bid) == std::strong_ordering::less;
}

} // namespace detail

/// First liquidity rule the quote fails, or nullopt if it is tradeable.
inline std::optional<DiscardReason> screen_quote(const OptionQuote& q, const FilterConfig& cfg) {
    if (!q.complete()) return DiscardReason::missing_side;
    if (detail::is_penny(*q.call_bid, *q.call_ask, cfg.penny_threshold) ||
        detail::is_penny(*q.put_bid, *q.put_ask, cfg.penny_threshold)) {
        return DiscardReason::penny;
    }
    if (detail::is_wide(*q.call_bid, *q.call_ask, cfg.max_bid_ask_ratio) ||
        detail::is_wide(*q.put_bid, *q.put_ask, cfg.max_bid_ask_ratio)) {
        return DiscardReason::wide_spread;
    }
    return std::nullopt;
}

/// Drops illiquid quotes, then maturities left with fewer than min_strikes_per_maturity strikes.
inline FilterResult filter_chain(const OptionChain& chain, const FilterConfig& cfg) {
    cfg.validate();
    FilterResult result;
    result.chain.market_id = chain.market_id;
    result.chain.value_date = chain.value_date;
    result.chain.observation_time = chain.observation_time;
    result.report.value_date = chain.value_date;

    for (const auto& slice : chain.slices) {
        MaturityFilterCounts counts;
        counts.maturity = slice.maturity;
        counts.input = slice.quotes.size();
        MaturitySlice kept{slice.maturity, {}};
        for (const auto& q : slice.quotes) {
            const auto reason = screen_quote(q, cfg);
            if (!reason) {
                kept.quotes.push_back(q);
                continue;
            }
            switch (*reason) {
            case DiscardReason::missing_side: ++counts.missing_side; break;
            case DiscardReason::penny: ++counts.penny; break;
            case DiscardReason::wide_spread: ++counts.wide_spread; break;
            }
        }
        if (kept.quotes.size() < static_cast<std::size_t>(cfg.min_strikes_per_maturity)) {
            counts.maturity_dropped = kept.quotes.size();
        } else {
            counts.kept = kept.quotes.size();
            result.chain.slices.push_back(std::move(kept));
        }
        result.report.maturities.push_back(counts);
    }
    return result;
}

} // namespace synfwd
