#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "synfwd/date.hpp"
#include "synfwd/errors.hpp"
#include "synfwd/liquidity_filter.hpp"
#include "synfwd/market_data.hpp"
#include "synfwd/ois_curve.hpp"
#include "synfwd/parallel.hpp"
#include "synfwd/stats.hpp"
#include "synfwd/synthetic_forward.hpp"

namespace synfwd {

inline constexpr double kBasisPoint = 1e-4;

/// Funding spread over OIS for one (value date, maturity).
struct SpreadObservation {
    Date value_date;
    Date maturity;
    double ttm = 0.0;    // Act/365 years
    double spread = 0.0; // continuously compounded, per annum
    double b_bar = 0.0;
    double b_ois = 0.0;
};

/// s = ln(B_ois / B_bar) / ttm with ttm on Act/365.
inline SpreadObservation funding_spread(double b_bar, const OisCurve& curve, Date value_date, Date maturity) {
    if (maturity <= value_date) throw InputError("funding_spread: maturity must be after value date");
    if (!(b_bar > 0.0)) throw InputError("funding_spread: implied discount must be positive");
    SpreadObservation obs;
    obs.value_date = value_date;
    obs.maturity = maturity;
    obs.ttm = year_fraction(value_date, maturity);
    obs.b_bar = b_bar;
    obs.b_ois = curve.discount(maturity);
    obs.spread = std::log(obs.b_ois / b_bar) / obs.ttm;
    return obs;
}

struct SpreadRegression {
    std::size_t n = 0;
    double intercept = 0.0; // per annum
    double slope = 0.0;     // per annum per year of ttm
    double se_intercept = 0.0;
    double se_slope = 0.0;
    double p_intercept = 1.0;
    double p_slope = 1.0;
    double intercept_no_slope = 0.0; // (weighted) mean spread
    bool weighted = false;
    bool perfect_fit = false;
};

inline constexpr double kDefaultMinTtm = 30.0 / 365.0;

namespace detail {

inline SpreadRegression to_regression(const stats::LineFit& f, bool weighted) {
    SpreadRegression r;
    r.n = f.n;
    r.intercept = f.intercept;
    r.slope = f.slope;
    r.se_intercept = f.se_intercept;
    r.se_slope = f.se_slope;
    r.p_intercept = f.p_intercept;
    r.p_slope = f.p_slope;
    r.intercept_no_slope = f.weighted_mean_y;
    r.weighted = weighted;
    r.perfect_fit = f.perfect_fit;
    return r;
}

} // namespace detail

/// Pooled regression of spread on ttm over observations with ttm > min_ttm.
///
/// The weighted variant refits once with weights 1/e_i^2 from the first-pass
/// residuals; residuals smaller than 1e-12 times the spread scale are floored there.
inline SpreadRegression fit_spread_panel(const std::vector<SpreadObservation>& obs, double min_ttm, bool weighted) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& o : obs) {
        if (o.ttm > min_ttm) {
            x.push_back(o.ttm);
            y.push_back(o.spread);
        }
    }
    if (x.size() < 3) {
        throw InputError("spread panel: need at least 3 observations with ttm > " + std::to_string(min_ttm) +
                         ", got " + std::to_string(x.size()));
    }
    const auto first = stats::fit_line(x, y);
    if (!weighted) return detail::to_regression(first, false);

    double scale = 0.0;
    for (double v : y) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    const double floor = 1e-12 * scale;
    std::vector<double> w(x.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double e = std::max(std::abs(first.residuals[i]), floor);
        w[i] = 1.0 / (e * e);
    }
    return detail::to_regression(stats::fit_line_weighted(x, y, w), true);
}

/// One row of the descriptive statistics table.
struct PanelStatistic {
    std::string market;
    std::string quantity; // n_strikes, straddle, forward_plus_strike
    stats::Summary summary;
};

/// Per market: strikes per (value date, maturity), mid straddle C+P, and G+K, over filtered chains.
inline std::vector<PanelStatistic> describe_panel(const std::vector<OptionChain>& chains) {
    if (chains.empty()) throw InputError("describe_panel: no chains");
    std::vector<std::string> order;
    std::map<std::string, std::tuple<std::vector<double>, std::vector<double>, std::vector<double>>> samples;
    for (const auto& chain : chains) {
        if (!samples.contains(chain.market_id)) order.push_back(chain.market_id);
        auto& [strikes, straddles, forwards] = samples[chain.market_id];
        for (const auto& slice : chain.slices) {
            strikes.push_back(static_cast<double>(slice.quotes.size()));
            for (const auto& g : synth_forwards(slice)) forwards.push_back((g.g_mid + g.strike).to_double());
            for (const auto& q : slice.quotes) {
                const Decimal straddle = (*q.call_bid + *q.call_ask).half() + (*q.put_bid + *q.put_ask).half();
                straddles.push_back(straddle.to_double());
            }
        }
    }
    std::vector<PanelStatistic> out;
    for (const auto& market : order) {
        const auto& [strikes, straddles, forwards] = samples[market];
        if (strikes.empty()) throw InputError("describe_panel: market " + market + " has no surviving maturities");
        out.push_back({market, "n_strikes", stats::summarize(strikes)});
        out.push_back({market, "straddle", stats::summarize(straddles)});
        out.push_back({market, "forward_plus_strike", stats::summarize(forwards)});
    }
    return out;
}

/// Option chains plus one OIS curve per value date.
struct Dataset {
    std::vector<OptionChain> chains;
    std::map<Date, OisCurve> curves;
};

struct PanelEstimate {
    std::vector<OptionChain> filtered;
    std::vector<FilterReport> reports;
    std::vector<SliceFit> fits;                // sorted by (value date, maturity)
    std::vector<SpreadObservation> spreads;    // fits usable against the curve
    std::size_t skipped_beyond_curve = 0;      // maturity past the last OIS pillar
    std::size_t skipped_invalid_discount = 0;  // b_bar <= 0
};

/// Filter every chain, fit every surviving maturity (fanned out over a worker pool).
inline PanelEstimate estimate_fits(const std::vector<OptionChain>& chains, const FilterConfig& cfg,
                                   unsigned workers = 0) {
    PanelEstimate est;
    struct Job {
        std::size_t chain;
        std::size_t slice;
    };
    std::vector<Job> jobs;
    for (const auto& chain : chains) {
        auto res = filter_chain(chain, cfg);
        for (std::size_t s = 0; s < res.chain.slices.size(); ++s) jobs.push_back({est.filtered.size(), s});
        est.filtered.push_back(std::move(res.chain));
        est.reports.push_back(std::move(res.report));
    }
    est.fits = parallel_map(
        jobs.size(),
        [&](std::size_t i) {
            const auto& chain = est.filtered[jobs[i].chain];
            return fit_slice(chain.slices[jobs[i].slice], chain.value_date);
        },
        workers);
    std::stable_sort(est.fits.begin(), est.fits.end(), [](const SliceFit& a, const SliceFit& b) {
        return std::tie(a.fit.value_date, a.fit.maturity) < std::tie(b.fit.value_date, b.fit.maturity);
    });
    return est;
}

struct SpreadSkips {
    std::size_t beyond_curve = 0;
    std::size_t invalid_discount = 0;
};

/// Spread for one fit, or nullopt (counted in skips) when b_bar <= 0 or the maturity
/// lies past the last OIS pillar. A value date without a curve is an input error.
inline std::optional<SpreadObservation> spread_for_fit(const ImpliedDiscountFit& fit,
                                                       const std::map<Date, OisCurve>& curves, SpreadSkips& skips) {
    const auto it = curves.find(fit.value_date);
    if (it == curves.end()) throw InputError("no OIS curve for value date " + fit.value_date.iso());
    if (!(fit.b_bar > 0.0)) {
        ++skips.invalid_discount;
        return std::nullopt;
    }
    if (!it->second.covers(fit.maturity)) {
        ++skips.beyond_curve;
        return std::nullopt;
    }
    return funding_spread(fit.b_bar, it->second, fit.value_date, fit.maturity);
}

inline void attach_spreads(PanelEstimate& est, const std::map<Date, OisCurve>& curves) {
    est.spreads.clear();
    SpreadSkips skips;
    for (const auto& sf : est.fits) {
        if (auto obs = spread_for_fit(sf.fit, curves, skips)) est.spreads.push_back(*obs);
    }
    est.skipped_beyond_curve = skips.beyond_curve;
    est.skipped_invalid_discount = skips.invalid_discount;
}

inline PanelEstimate estimate_panel(const Dataset& data, const FilterConfig& cfg, unsigned workers = 0) {
    auto est = estimate_fits(data.chains, cfg, workers);
    attach_spreads(est, data.curves);
    return est;
}

struct RobustnessBase {
    FilterConfig filter;
    double min_ttm = kDefaultMinTtm;
};

struct RobustnessRow {
    std::string variant;
    SpreadRegression regression;
};

struct RobustnessReport {
    std::vector<RobustnessRow> rows; // first row is the unweighted base run
    double max_intercept_deviation_bp = 0.0;
    double max_intercept_no_slope_deviation_bp = 0.0;
};

inline const std::vector<Decimal>& robustness_penny_grid() {
    static const std::vector<Decimal> grid = {Decimal::from_units(5, 2), Decimal::from_units(1, 1),
                                              Decimal::from_units(25, 2), Decimal::from_units(5, 1),
                                              Decimal::from_int(1)};
    return grid;
}

inline const std::vector<Decimal>& robustness_ratio_grid() {
    static const std::vector<Decimal> grid = {Decimal::from_units(3, 1), Decimal::from_units(45, 2),
                                              Decimal::from_units(6, 1), Decimal::from_units(75, 2),
                                              Decimal::from_units(9, 1)};
    return grid;
}

/// Re-runs the spread regression under the four families of perturbations:
///   (i)   weighted fit, on the base panel and the restricted panels of (iii)/(iv), next to the base run
///   (ii)  penny threshold x bid-ask ratio grid
///   (iii) ttm > 1, 6 and 12 months
///   (iv)  no minimum strike count
inline RobustnessReport robustness_suite(const Dataset& data, const RobustnessBase& base, unsigned workers = 0) {
    std::map<std::tuple<Decimal, Decimal, int>, std::vector<SpreadObservation>> panels;
    const auto panel_for = [&](const FilterConfig& cfg) -> const std::vector<SpreadObservation>& {
        const auto key = std::make_tuple(cfg.penny_threshold, cfg.max_bid_ask_ratio, cfg.min_strikes_per_maturity);
        auto it = panels.find(key);
        if (it == panels.end()) it = panels.emplace(key, estimate_panel(data, cfg, workers).spreads).first;
        return it->second;
    };

    FilterConfig no_min_strikes = base.filter;
    no_min_strikes.min_strikes_per_maturity = 1;
    const double ttm_6m = 182.0 / 365.0;
    const double ttm_12m = 1.0;

    RobustnessReport report;
    const auto add = [&](std::string key, const FilterConfig& cfg, double min_ttm, bool weighted) {
        report.rows.push_back({std::move(key), fit_spread_panel(panel_for(cfg), min_ttm, weighted)});
    };

    add("base", base.filter, base.min_ttm, false);
    add("i_weighted", base.filter, base.min_ttm, true);
    add("i_weighted_ttm_gt_6m", base.filter, ttm_6m, true);
    add("i_weighted_ttm_gt_12m", base.filter, ttm_12m, true);
    add("i_weighted_min_strikes_1", no_min_strikes, base.min_ttm, true);
    for (const auto& penny : robustness_penny_grid()) {
        for (const auto& ratio : robustness_ratio_grid()) {
            FilterConfig cfg = base.filter;
            cfg.penny_threshold = penny;
            cfg.max_bid_ask_ratio = ratio;
            add("ii_penny_" + penny.to_string() + "_ratio_" + ratio.to_string(), cfg, base.min_ttm, false);
        }
    }
    add("iii_ttm_gt_1m", base.filter, 30.0 / 365.0, false);
    add("iii_ttm_gt_6m", base.filter, ttm_6m, false);
    add("iii_ttm_gt_12m", base.filter, ttm_12m, false);
    add("iv_min_strikes_1", no_min_strikes, base.min_ttm, false);

    const auto& ref = report.rows.front().regression;
    for (const auto& row : report.rows) {
        report.max_intercept_deviation_bp = std::max(
            report.max_intercept_deviation_bp, std::abs(row.regression.intercept - ref.intercept) / kBasisPoint);
        report.max_intercept_no_slope_deviation_bp =
            std::max(report.max_intercept_no_slope_deviation_bp,
                     std::abs(row.regression.intercept_no_slope - ref.intercept_no_slope) / kBasisPoint);
    }
    return report;
}

} // namespace synfwd
