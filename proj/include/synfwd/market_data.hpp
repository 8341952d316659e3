#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "synfwd/date.hpp"
#include "synfwd/decimal.hpp"
#include "synfwd/errors.hpp"

namespace synfwd {

/// One strike's call/put quotes. Any side may be missing.
struct OptionQuote {
    Decimal strike;
    std::optional<Decimal> call_bid;
    std::optional<Decimal> call_ask;
    std::optional<Decimal> put_bid;
    std::optional<Decimal> put_ask;

    [[nodiscard]] bool complete() const { return call_bid && call_ask && put_bid && put_ask; }

    friend bool operator==(const OptionQuote&, const OptionQuote&) = default;
};

struct MaturitySlice {
    Date maturity;
    std::vector<OptionQuote> quotes; // strictly increasing strike

    friend bool operator==(const MaturitySlice&, const MaturitySlice&) = default;
};

struct OptionChain {
    std::string market_id;
    Date value_date;
    std::string observation_time;
    std::vector<MaturitySlice> slices; // strictly increasing maturity

    [[nodiscard]] std::size_t quote_count() const {
        std::size_t n = 0;
        for (const auto& s : slices) n += s.quotes.size();
        return n;
    }

    friend bool operator==(const OptionChain&, const OptionChain&) = default;
};

/// OIS tenor as a whole number of calendar months.
struct Tenor {
    int months = 0;

    /// Accepts "<n>M" for n in {1..12, 15, 18, 21} and "<n>Y" for n in 1..5.
    static std::optional<Tenor> parse(std::string_view token) {
        if (token.size() < 2 || token.size() > 3) return std::nullopt;
        const char unit = token.back();
        int n = 0;
        for (char c : token.substr(0, token.size() - 1)) {
            if (c < '0' || c > '9') return std::nullopt;
            n = n * 10 + (c - '0');
        }
        if (token[0] == '0') return std::nullopt;
        if (unit == 'M' && ((n >= 1 && n <= 12) || n == 15 || n == 18 || n == 21)) return Tenor{n};
        if (unit == 'Y' && n >= 1 && n <= 5) return Tenor{12 * n};
        return std::nullopt;
    }

    [[nodiscard]] std::string to_string() const {
        if (months > 12 && months % 12 == 0) return std::to_string(months / 12) + "Y";
        return std::to_string(months) + "M";
    }

    friend auto operator<=>(const Tenor&, const Tenor&) = default;
};

struct OisQuote {
    Tenor tenor;
    Decimal rate; // per annum, 0.02 = 2%

    friend bool operator==(const OisQuote&, const OisQuote&) = default;
};

struct OisQuoteSet {
    std::string currency;
    Date value_date;
    std::vector<OisQuote> quotes; // strictly increasing tenor

    friend bool operator==(const OisQuoteSet&, const OisQuoteSet&) = default;
};

inline constexpr std::string_view kOptionChainHeader = "value_date,maturity,strike,call_bid,call_ask,put_bid,put_ask";
inline constexpr std::string_view kOisHeader = "value_date,currency,tenor,rate";

/// Price fields carry at most 10 fractional digits and stay below 1e7, which keeps every
/// sum, difference and half taken by the filter and the synthetic forwards exact in a Decimal.
inline constexpr int kMaxPriceScale = 10;
inline constexpr Decimal kMaxPrice = Decimal::from_int(10'000'000);

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Numbered non-empty lines of a CSV document; line numbers are 1-based file lines.
inline std::vector<std::pair<std::size_t, std::string_view>> csv_lines(std::string_view text) {
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    if (text.substr(0, 3) == "\xEF\xBB\xBF") start = 3;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        const auto line = trim(text.substr(start, end - start));
        if (!line.empty()) out.emplace_back(line_no, line);
        start = end + 1;
    }
    return out;
}

inline void expect_header(const std::vector<std::pair<std::size_t, std::string_view>>& lines,
                          std::string_view expected) {
    if (lines.empty()) throw InputError("empty input: missing header '" + std::string(expected) + "'");
    std::string header;
    for (auto f : split_csv_line(lines.front().second)) {
        if (!header.empty()) header += ',';
        header += trim(f);
    }
    if (header != expected) {
        throw InputError("row " + std::to_string(lines.front().first) + ": malformed header '" + header +
                         "', expected '" + std::string(expected) + "'");
    }
}

[[noreturn]] inline void row_error(std::size_t row, const std::string& what) {
    throw InputError("row " + std::to_string(row) + ": " + what);
}

inline Date parse_date_field(std::string_view s, std::size_t row, const char* name) {
    const auto d = Date::parse_iso(trim(s));
    if (!d) row_error(row, std::string("invalid ") + name + " '" + std::string(s) + "'");
    return *d;
}

inline std::optional<Decimal> parse_price_field(std::string_view s, std::size_t row, const char* name) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    const auto d = Decimal::parse(s);
    if (!d) row_error(row, std::string("unparseable ") + name + " '" + std::string(s) + "'");
    if (d->is_negative()) row_error(row, std::string("negative ") + name);
    if (d->scale() > kMaxPriceScale) {
        row_error(row, std::string(name) + " has more than " + std::to_string(kMaxPriceScale) + " fractional digits");
    }
    if (*d >= kMaxPrice) row_error(row, std::string(name) + " out of range");
    return d;
}

} // namespace detail

/// Parses an option-chain CSV that may span several value dates; one chain per value date, sorted by date.
inline std::vector<OptionChain> parse_option_chains(std::string_view text, const std::string& market_id) {
    const auto lines = detail::csv_lines(text);
    detail::expect_header(lines, kOptionChainHeader);

    struct Row {
        std::size_t line;
        OptionQuote quote;
    };
    std::map<Date, std::map<Date, std::vector<Row>>> by_date;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [row, line] = lines[i];
        const auto f = detail::split_csv_line(line);
        if (f.size() != 7) {
            detail::row_error(row, "expected 7 fields, found " + std::to_string(f.size()));
        }
        const Date value_date = detail::parse_date_field(f[0], row, "value_date");
        const Date maturity = detail::parse_date_field(f[1], row, "maturity");
        if (maturity <= value_date) detail::row_error(row, "maturity " + maturity.iso() + " not after value date");

        OptionQuote q;
        const auto strike = detail::parse_price_field(f[2], row, "strike");
        if (!strike || strike->is_zero()) detail::row_error(row, "strike must be present and positive");
        q.strike = *strike;
        q.call_bid = detail::parse_price_field(f[3], row, "call_bid");
        q.call_ask = detail::parse_price_field(f[4], row, "call_ask");
        q.put_bid = detail::parse_price_field(f[5], row, "put_bid");
        q.put_ask = detail::parse_price_field(f[6], row, "put_ask");
        if (q.call_bid && q.call_ask && *q.call_bid > *q.call_ask) detail::row_error(row, "call bid exceeds ask");
        if (q.put_bid && q.put_ask && *q.put_bid > *q.put_ask) detail::row_error(row, "put bid exceeds ask");

        by_date[value_date][maturity].push_back({row, q});
    }

    std::vector<OptionChain> chains;
    for (auto& [value_date, maturities] : by_date) {
        OptionChain chain{market_id, value_date, {}, {}};
        for (auto& [maturity, rows] : maturities) {
            std::stable_sort(rows.begin(), rows.end(),
                             [](const Row& a, const Row& b) { return a.quote.strike < b.quote.strike; });
            MaturitySlice slice{maturity, {}};
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (k > 0 && rows[k].quote.strike == rows[k - 1].quote.strike) {
                    detail::row_error(rows[k].line, "duplicate (maturity, strike) = (" + maturity.iso() + ", " +
                                                        rows[k].quote.strike.to_string() + "), first seen at row " +
                                                        std::to_string(rows[k - 1].line));
                }
                slice.quotes.push_back(rows[k].quote);
            }
            chain.slices.push_back(std::move(slice));
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

/// Parses a single-value-date option chain.
inline OptionChain parse_option_chain(std::string_view text, const std::string& market_id) {
    auto chains = parse_option_chains(text, market_id);
    if (chains.empty()) throw InputError("option chain has no data rows");
    if (chains.size() > 1) throw InputError("option chain spans " + std::to_string(chains.size()) + " value dates");
    return std::move(chains.front());
}

inline std::string serialize_option_chain(const OptionChain& chain) {
    std::string out(kOptionChainHeader);
    out += '\n';
    const auto opt = [](const std::optional<Decimal>& d) { return d ? d->to_string() : std::string(); };
    for (const auto& slice : chain.slices) {
        for (const auto& q : slice.quotes) {
            out += chain.value_date.iso();
            out += ',';
            out += slice.maturity.iso();
            out += ',';
            out += q.strike.to_string();
            out += ',' + opt(q.call_bid) + ',' + opt(q.call_ask) + ',' + opt(q.put_bid) + ',' + opt(q.put_ask) + '\n';
        }
    }
    return out;
}

/// Parses an OIS quote CSV; one set per (value_date, currency), sorted by both.
inline std::vector<OisQuoteSet> parse_ois_quote_sets(std::string_view text) {
    const auto lines = detail::csv_lines(text);
    detail::expect_header(lines, kOisHeader);

    std::map<std::pair<Date, std::string>, std::map<Tenor, std::pair<std::size_t, Decimal>>> groups;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [row, line] = lines[i];
        const auto f = detail::split_csv_line(line);
        if (f.size() != 4) detail::row_error(row, "expected 4 fields, found " + std::to_string(f.size()));
        const Date value_date = detail::parse_date_field(f[0], row, "value_date");
        const std::string currency(detail::trim(f[1]));
        if (currency.empty()) detail::row_error(row, "missing currency");
        const auto token = detail::trim(f[2]);
        const auto tenor = Tenor::parse(token);
        if (!tenor) detail::row_error(row, "unknown tenor token '" + std::string(token) + "'");

        const auto rate_text = detail::trim(f[3]);
        const auto rate = Decimal::parse(rate_text);
        if (!rate) {
            std::string lower;
            for (char c : rate_text) lower += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
            if (lower.find("nan") != std::string::npos || lower.find("inf") != std::string::npos) {
                detail::row_error(row, "non-finite rate '" + std::string(rate_text) + "'");
            }
            detail::row_error(row, "unparseable rate '" + std::string(rate_text) + "'");
        }

        auto& set = groups[{value_date, currency}];
        const auto [it, inserted] = set.emplace(*tenor, std::make_pair(row, *rate));
        if (!inserted) {
            detail::row_error(row, "duplicate tenor " + tenor->to_string() + " (first seen at row " +
                                       std::to_string(it->second.first) + ")");
        }
    }

    std::vector<OisQuoteSet> out;
    for (const auto& [key, tenors] : groups) {
        OisQuoteSet set{key.second, key.first, {}};
        for (const auto& [tenor, entry] : tenors) set.quotes.push_back({tenor, entry.second});
        out.push_back(std::move(set));
    }
    return out;
}

/// Parses an OIS file holding exactly one (value_date, currency) set.
inline OisQuoteSet parse_ois_quotes(std::string_view text) {
    auto sets = parse_ois_quote_sets(text);
    if (sets.empty()) throw InputError("OIS file has no data rows");
    if (sets.size() > 1) throw InputError("OIS file holds " + std::to_string(sets.size()) + " quote sets");
    return std::move(sets.front());
}

inline std::string serialize_ois_quotes(const std::vector<OisQuoteSet>& sets) {
    std::string out(kOisHeader);
    out += '\n';
    for (const auto& set : sets) {
        for (const auto& q : set.quotes) {
            out += set.value_date.iso() + ',' + set.currency + ',' + q.tenor.to_string() + ',' + q.rate.to_string() +
                   '\n';
        }
    }
    return out;
}

} // namespace synfwd
