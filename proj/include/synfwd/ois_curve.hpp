#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "synfwd/date.hpp"
#include "synfwd/errors.hpp"
#include "synfwd/market_data.hpp"

namespace synfwd {

struct CurvePillar {
    Date date;
    double discount;

    friend bool operator==(const CurvePillar&, const CurvePillar&) = default;
};

/// Discount-factor term structure anchored at (value_date, 1).
///
/// Log-linear interpolation on discount factors with an Act/365 time axis,
/// i.e. piecewise-constant instantaneous forwards between pillars. Queries
/// past the last pillar are rejected rather than extrapolated.
class OisCurve {
public:
    OisCurve(Date value_date, std::vector<CurvePillar> pillars)
        : value_date_(value_date), pillars_(std::move(pillars)) {
        if (pillars_.empty()) throw InputError("OIS curve needs at least one pillar");
        Date prev = value_date_;
        for (const auto& p : pillars_) {
            if (p.date <= prev) throw InputError("OIS curve pillar dates must be strictly increasing after value date");
            if (!(p.discount > 0.0) || !std::isfinite(p.discount)) {
                throw InputError("OIS curve pillar " + p.date.iso() + " has non-positive discount");
            }
            prev = p.date;
        }
    }

    [[nodiscard]] Date value_date() const { return value_date_; }
    [[nodiscard]] const std::vector<CurvePillar>& pillars() const { return pillars_; }
    [[nodiscard]] Date last_date() const { return pillars_.back().date; }
    [[nodiscard]] bool covers(Date t) const { return t >= value_date_ && t <= last_date(); }

    [[nodiscard]] double discount(Date t) const {
        if (!covers(t)) {
            throw InputError("discount date " + t.iso() + " outside curve range [" + value_date_.iso() + ", " +
                             last_date().iso() + "]");
        }
        if (t == value_date_) return 1.0;
        const auto it = std::lower_bound(pillars_.begin(), pillars_.end(), t,
                                         [](const CurvePillar& p, Date d) { return p.date < d; });
        if (it->date == t) return it->discount;

        const Date left_date = it == pillars_.begin() ? value_date_ : std::prev(it)->date;
        const double left_df = it == pillars_.begin() ? 1.0 : std::prev(it)->discount;
        const double t0 = year_fraction(value_date_, left_date);
        const double t1 = year_fraction(value_date_, it->date);
        const double w = (year_fraction(value_date_, t) - t0) / (t1 - t0);
        return std::exp((1.0 - w) * std::log(left_df) + w * std::log(it->discount));
    }

private:
    Date value_date_;
    std::vector<CurvePillar> pillars_;
};

/// Fixed-leg payment dates of an OIS with the given tenor, starting at value_date.
/// Up to 12 months: one payment at maturity. Longer: annual, rolled back from maturity, short stub first.
inline std::vector<Date> ois_fixed_leg_schedule(Date value_date, Tenor tenor) {
    if (tenor.months <= 0) throw InputError("OIS tenor must be positive");
    std::vector<Date> dates;
    for (int m = tenor.months; m > 0; m -= 12) dates.push_back(value_date.add_months(m));
    std::reverse(dates.begin(), dates.end());
    return dates;
}

/// Par fixed rate of an OIS implied by the curve (Act/360 fixed leg).
inline double ois_par_rate(const OisCurve& curve, Tenor tenor) {
    const auto schedule = ois_fixed_leg_schedule(curve.value_date(), tenor);
    double annuity = 0.0;
    Date prev = curve.value_date();
    for (const Date d : schedule) {
        annuity += act360(prev, d) * curve.discount(d);
        prev = d;
    }
    return (1.0 - curve.discount(schedule.back())) / annuity;
}

struct BootstrapSettings {
    double tolerance = 1e-14;
    int max_iterations = 100;
    double max_discount_jump = 1.5; // solved discount may not exceed previous pillar times this
};

/// Bootstraps pillar discount factors so that every quoted OIS prices at par.
///
/// Pillars are solved in increasing tenor order. Coupon dates that fall
/// between pillars are read off the curve being built, which makes the last
/// pillar appear on both sides; that case is solved by fixed-point iteration.
inline OisCurve bootstrap(const OisQuoteSet& quotes, const BootstrapSettings& settings = {}) {
    if (quotes.quotes.empty()) throw InputError("OIS bootstrap: no quotes for " + quotes.value_date.iso());
    const Date t0 = quotes.value_date;
    std::vector<CurvePillar> pillars;
    int prev_months = 0;
    for (const auto& q : quotes.quotes) {
        if (q.tenor.months <= prev_months) throw InputError("OIS bootstrap: tenors must be strictly increasing");
        if (q.tenor.months > 60) throw InputError("OIS bootstrap: tenor " + q.tenor.to_string() + " beyond 5Y");
        prev_months = q.tenor.months;

        const double rate = q.rate.to_double();
        const auto schedule = ois_fixed_leg_schedule(t0, q.tenor);
        const Date maturity = schedule.back();
        const Date last_start = schedule.size() > 1 ? schedule[schedule.size() - 2] : t0;
        const double tau_last = act360(last_start, maturity);
        const double prev_df = pillars.empty() ? 1.0 : pillars.back().discount;

        double df = 1.0 / (1.0 + rate * act360(t0, maturity));
        bool converged = schedule.size() == 1;
        for (int iter = 0; iter < settings.max_iterations && !converged; ++iter) {
            auto trial = pillars;
            trial.push_back({maturity, df > 0.0 ? df : prev_df});
            const OisCurve partial(t0, std::move(trial));
            double annuity = 0.0;
            Date prev = t0;
            for (std::size_t j = 0; j + 1 < schedule.size(); ++j) {
                annuity += act360(prev, schedule[j]) * partial.discount(schedule[j]);
                prev = schedule[j];
            }
            const double next = (1.0 - rate * annuity) / (1.0 + rate * tau_last);
            converged = std::abs(next - df) <= settings.tolerance;
            df = next;
            if (!(df > 0.0)) break;
        }
        if (!(df > 0.0) || df > prev_df * settings.max_discount_jump || !std::isfinite(df)) {
            throw InputError("OIS bootstrap: arbitrage-violating quote at pillar " + q.tenor.to_string() +
                             " (solved discount " + std::to_string(df) + ")");
        }
        if (!converged) {
            throw NumericalError("OIS bootstrap: fixed point did not converge at pillar " + q.tenor.to_string());
        }
        pillars.push_back({maturity, df});
    }
    return OisCurve(t0, std::move(pillars));
}

/// `date,discount` per pillar.
inline std::string serialize_curve(const OisCurve& curve) {
    std::string out = "date,discount\n";
    char buf[64];
    for (const auto& p : curve.pillars()) {
        const auto res = std::to_chars(buf, buf + sizeof buf, p.discount);
        out += p.date.iso() + ',' + std::string(buf, res.ptr) + '\n';
    }
    return out;
}

} // namespace synfwd
