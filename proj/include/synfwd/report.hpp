#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "synfwd/liquidity_filter.hpp"
#include "synfwd/market_data.hpp"
#include "synfwd/spread_analytics.hpp"
#include "synfwd/synthetic_forward.hpp"

namespace synfwd::report {

/// Shortest decimal text that round-trips to the same double.
inline std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    std::string s(buf);
    // "-0.0" and friends read as a sign where there is none
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline std::string general(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline constexpr std::string_view kFitsHeader = "value_date,maturity,n_strikes,b_bar,forward,r_squared,f_bid,f_ask,flags";
inline constexpr std::string_view kSpreadsHeader = "value_date,maturity,ttm_years,b_bar,b_ois,spread_bp";
inline constexpr std::string_view kRegressionHeader =
    "variant,n,intercept_bp,p_intercept,slope_bp_per_year,p_slope,intercept_no_slope_bp,weighted";
inline constexpr std::string_view kFilterHeader =
    "value_date,maturity,input,kept,missing_side,penny,wide_spread,maturity_dropped";

inline std::string fits_csv(const std::vector<SliceFit>& fits) {
    std::string out(kFitsHeader);
    out += '\n';
    for (const auto& sf : fits) {
        const auto& f = sf.fit;
        const bool has_envelope = f.b_bar > 0.0;
        out += f.value_date.iso() + ',' + f.maturity.iso() + ',' + std::to_string(f.n_strikes) + ',' + num(f.b_bar) +
               ',' + num(f.forward) + ',' + num(f.r_squared) + ',' + (has_envelope ? num(sf.bid_ask.f_bid) : "") +
               ',' + (has_envelope ? num(sf.bid_ask.f_ask) : "") + ',' + fit_flags_to_string(f.flags) + '\n';
    }
    return out;
}

namespace detail {

inline double parse_double_field(std::string_view s, std::size_t row, const char* name) {
    s = synfwd::detail::trim(s);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        synfwd::detail::row_error(row, std::string("unparseable ") + name + " '" + std::string(s) + "'");
    }
    return v;
}

} // namespace detail

/// Reads the fields of a fits CSV that later stages consume (dates, b_bar, forward, r^2, flags).
inline std::vector<ImpliedDiscountFit> parse_fits_csv(std::string_view text) {
    const auto lines = synfwd::detail::csv_lines(text);
    synfwd::detail::expect_header(lines, kFitsHeader);
    std::vector<ImpliedDiscountFit> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [row, line] = lines[i];
        const auto f = synfwd::detail::split_csv_line(line);
        if (f.size() != 9) synfwd::detail::row_error(row, "expected 9 fields, found " + std::to_string(f.size()));
        ImpliedDiscountFit fit;
        fit.value_date = synfwd::detail::parse_date_field(f[0], row, "value_date");
        fit.maturity = synfwd::detail::parse_date_field(f[1], row, "maturity");
        fit.n_strikes = static_cast<std::size_t>(detail::parse_double_field(f[2], row, "n_strikes"));
        fit.b_bar = detail::parse_double_field(f[3], row, "b_bar");
        fit.forward = detail::parse_double_field(f[4], row, "forward");
        fit.r_squared = detail::parse_double_field(f[5], row, "r_squared");
        try {
            fit.flags = fit_flags_from_string(synfwd::detail::trim(f[8]));
        } catch (const InputError& e) {
            synfwd::detail::row_error(row, e.what());
        }
        out.push_back(std::move(fit));
    }
    return out;
}

inline std::string spreads_csv(const std::vector<SpreadObservation>& obs) {
    std::string out(kSpreadsHeader);
    out += '\n';
    for (const auto& o : obs) {
        out += o.value_date.iso() + ',' + o.maturity.iso() + ',' + num(o.ttm) + ',' + num(o.b_bar) + ',' +
               num(o.b_ois) + ',' + num(o.spread / kBasisPoint) + '\n';
    }
    return out;
}

/// Rebuilds observations from a spreads CSV. The spread is recomputed from the discounts
/// and the dates so that it matches an in-process run bit for bit.
inline std::vector<SpreadObservation> parse_spreads_csv(std::string_view text) {
    const auto lines = synfwd::detail::csv_lines(text);
    synfwd::detail::expect_header(lines, kSpreadsHeader);
    std::vector<SpreadObservation> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [row, line] = lines[i];
        const auto f = synfwd::detail::split_csv_line(line);
        if (f.size() != 6) synfwd::detail::row_error(row, "expected 6 fields, found " + std::to_string(f.size()));
        SpreadObservation o;
        o.value_date = synfwd::detail::parse_date_field(f[0], row, "value_date");
        o.maturity = synfwd::detail::parse_date_field(f[1], row, "maturity");
        if (o.maturity <= o.value_date) synfwd::detail::row_error(row, "maturity not after value date");
        o.ttm = year_fraction(o.value_date, o.maturity);
        o.b_bar = detail::parse_double_field(f[3], row, "b_bar");
        o.b_ois = detail::parse_double_field(f[4], row, "b_ois");
        if (!(o.b_bar > 0.0) || !(o.b_ois > 0.0)) synfwd::detail::row_error(row, "discounts must be positive");
        o.spread = std::log(o.b_ois / o.b_bar) / o.ttm;
        out.push_back(o);
    }
    return out;
}

inline std::string regression_row(const std::string& variant, const SpreadRegression& r) {
    return variant + ',' + std::to_string(r.n) + ',' + fixed(r.intercept / kBasisPoint, 1) + ',' +
           general(r.p_intercept) + ',' + fixed(r.slope / kBasisPoint, 1) + ',' + general(r.p_slope) + ',' +
           fixed(r.intercept_no_slope / kBasisPoint, 1) + ',' + (r.weighted ? "true" : "false") + '\n';
}

inline std::string regression_csv(const std::vector<std::pair<std::string, SpreadRegression>>& rows) {
    std::string out(kRegressionHeader);
    out += '\n';
    for (const auto& [variant, r] : rows) out += regression_row(variant, r);
    return out;
}

inline std::string robustness_csv(const RobustnessReport& rep) {
    std::string out(kRegressionHeader);
    out += '\n';
    for (const auto& row : rep.rows) out += regression_row(row.variant, row.regression);
    return out;
}

inline std::string robustness_summary_csv(const RobustnessReport& rep) {
    return "variants,max_intercept_deviation_bp,max_intercept_no_slope_deviation_bp\n" +
           std::to_string(rep.rows.size()) + ',' + fixed(rep.max_intercept_deviation_bp, 2) + ',' +
           fixed(rep.max_intercept_no_slope_deviation_bp, 2) + '\n';
}

inline std::string filter_report_csv(const std::vector<FilterReport>& reports) {
    std::string out(kFilterHeader);
    out += '\n';
    for (const auto& rep : reports) {
        for (const auto& m : rep.maturities) {
            out += rep.value_date.iso() + ',' + m.maturity.iso() + ',' + std::to_string(m.input) + ',' +
                   std::to_string(m.kept) + ',' + std::to_string(m.missing_side) + ',' + std::to_string(m.penny) +
                   ',' + std::to_string(m.wide_spread) + ',' + std::to_string(m.maturity_dropped) + '\n';
        }
    }
    return out;
}

inline std::string describe_csv(const std::vector<PanelStatistic>& stats) {
    std::string out = "market,quantity,n,mean,median,std,q05,q95\n";
    for (const auto& s : stats) {
        const auto& m = s.summary;
        out += s.market + ',' + s.quantity + ',' + std::to_string(m.n) + ',' + fixed(m.mean, 2) + ',' +
               fixed(m.median, 2) + ',' + fixed(m.std, 2) + ',' + fixed(m.q05, 2) + ',' + fixed(m.q95, 2) + '\n';
    }
    return out;
}

} // namespace synfwd::report
