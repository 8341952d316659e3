#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "synfwd/date.hpp"
#include "synfwd/decimal.hpp"
#include "synfwd/errors.hpp"
#include "synfwd/market_data.hpp"
#include "synfwd/ois_curve.hpp"

namespace synfwd {

/// Knobs for the synthetic market. Quotes satisfy put-call parity exactly before noise:
/// C - P = B_bar (F - K) with B_bar = B_ois exp(-s(ttm) ttm), s(ttm) = spread + spread_slope * ttm.
struct SyntheticSpec {
    std::string market = "SYNTH";
    std::string currency = "USD";
    Date start = Date::ymd(2018, 11, 1);
    int n_dates = 150;      // consecutive weekdays from start
    int n_maturities = 12;  // per value date
    int n_strikes = 60;     // per maturity
    double spread = 0.0034; // per annum
    double spread_slope = 0.0;
    double noise_sigma = 0.01; // index points, per option mid
    double half_width = 0.05;  // absolute half bid-ask spread, index points
    double half_width_rel = 0.01;
    double spot = 2800.0;
    double ois_level = 0.024;
    std::uint64_t seed = 42;

    void validate() const {
        if (n_dates < 1 || n_maturities < 1 || n_strikes < 1) throw InputError("synthetic spec: counts must be >= 1");
        if (noise_sigma < 0.0 || half_width < 0.0 || half_width_rel < 0.0) {
            throw InputError("synthetic spec: noise and widths must be >= 0");
        }
        if (!(spot > 0.0)) throw InputError("synthetic spec: spot must be positive");
    }
};

struct SyntheticFiles {
    std::string options_csv;
    std::string ois_csv;
};

namespace detail {

// Box-Muller on a 64-bit Mersenne twister; portable across standard libraries.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double kTwoPi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(kTwoPi * u2);
        has_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

private:
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline Date third_friday(int year, int month) {
    const Date first = Date::ymd(year, month, 1);
    const int to_friday = (4 - first.weekday() + 7) % 7;
    return first.add_days(to_friday + 14);
}

// Rounded to the finest precision the option-chain schema accepts.
inline std::string price_text(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, kMaxPriceScale);
    const auto d = Decimal::parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
    if (!d || *d >= kMaxPrice) throw NumericalError("synthetic price out of range");
    return d->to_string();
}

} // namespace detail

/// Listed expiries: the next six monthly third Fridays, then quarterly ones within a
/// year of the value date, then June/December ones, all at most 60 months out.
inline std::vector<Date> listed_expiries(Date value_date, int count) {
    std::vector<Date> out;
    const Date horizon = value_date.add_months(60);
    const Date front_year = value_date.add_months(12);
    int monthly = 0;
    for (int k = 0; k <= 61 && static_cast<int>(out.size()) < count; ++k) {
        const Date month = Date::ymd(value_date.year(), value_date.month(), 1).add_months(k);
        const Date expiry = detail::third_friday(month.year(), month.month());
        if (expiry <= value_date || expiry > horizon) continue;
        const int m = month.month();
        bool listed = false;
        if (monthly < 6) {
            listed = true;
            ++monthly;
        } else if (expiry <= front_year) {
            listed = m % 3 == 0;
        } else {
            listed = m == 6 || m == 12;
        }
        if (listed) out.push_back(expiry);
    }
    return out;
}

inline SyntheticFiles generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    detail::NormalSource normal(spec.seed);

    std::vector<Date> dates;
    for (Date d = spec.start; static_cast<int>(dates.size()) < spec.n_dates; d = d.add_days(1)) {
        if (d.weekday() < 5) dates.push_back(d);
    }

    constexpr int kPillarMonths[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 15, 18, 21, 24, 36, 48, 60};

    std::vector<OisQuoteSet> ois_sets;
    std::string options(kOptionChainHeader);
    options += '\n';

    double level = spec.ois_level;
    double spot = spec.spot;
    for (const Date t0 : dates) {
        level += 0.0002 * normal();
        spot *= std::exp(0.01 * normal());

        OisQuoteSet set{spec.currency, t0, {}};
        for (const int months : kPillarMonths) {
            const double years = months / 12.0;
            const double rate = level + 0.004 * (1.0 - std::exp(-years)) - 0.0004 * years;
            set.quotes.push_back({Tenor{months}, Decimal::from_units(std::llround(rate * 1e6), 6)});
        }
        const OisCurve curve = bootstrap(set);
        ois_sets.push_back(std::move(set));

        for (const Date maturity : listed_expiries(t0, spec.n_maturities)) {
            if (!curve.covers(maturity)) continue;
            const double ttm = year_fraction(t0, maturity);
            const double forward = spot * std::exp(0.005 * ttm);
            const double spread = spec.spread + spec.spread_slope * ttm;
            const double b_bar = curve.discount(maturity) * std::exp(-spread * ttm);

            const double sqrt_t = std::sqrt(ttm);
            const double width = std::min(0.35, 0.08 + 0.15 * sqrt_t);
            const int n = spec.n_strikes;
            const double step = n > 1 ? std::max(1.0, std::round(2.0 * width * forward / (n - 1))) : 1.0;
            const double center = std::round(forward / step) * step;

            for (int j = 0; j < n; ++j) {
                const double strike = center + (j - (n - 1) / 2) * step;
                if (strike <= 0.0) continue;
                const double moneyness = strike / forward - 1.0;
                const double z = moneyness / (0.1 * sqrt_t);
                const double time_value = 0.3 + 0.02 * forward * sqrt_t / (1.0 + z * z);
                double call = b_bar * (std::max(forward - strike, 0.0) + time_value);
                double put = b_bar * (std::max(strike - forward, 0.0) + time_value);
                if (spec.noise_sigma > 0.0) {
                    call += spec.noise_sigma * normal();
                    put += spec.noise_sigma * normal();
                }
                call = std::max(call, 0.0);
                put = std::max(put, 0.0);
                const double hc = spec.half_width + spec.half_width_rel * call;
                const double hp = spec.half_width + spec.half_width_rel * put;

                options += t0.iso() + ',' + maturity.iso() + ',' + detail::price_text(strike) + ',' +
                           detail::price_text(std::max(call - hc, 0.0)) + ',' + detail::price_text(call + hc) + ',' +
                           detail::price_text(std::max(put - hp, 0.0)) + ',' + detail::price_text(put + hp) + '\n';
            }
        }
    }
    return {std::move(options), serialize_ois_quotes(ois_sets)};
}

} // namespace synfwd
