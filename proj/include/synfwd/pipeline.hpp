#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "synfwd/errors.hpp"
#include "synfwd/liquidity_filter.hpp"
#include "synfwd/market_data.hpp"
#include "synfwd/ois_curve.hpp"
#include "synfwd/report.hpp"
#include "synfwd/spread_analytics.hpp"
#include "synfwd/svg_plot.hpp"
#include "synfwd/synthetic_forward.hpp"

namespace synfwd {

struct RunConfig {
    std::vector<std::filesystem::path> option_files;
    std::filesystem::path ois_file;
    std::string market;   // defaults to the stem of the first option file
    std::string currency; // required only when the OIS file mixes currencies
    FilterConfig filter;
    double min_ttm = kDefaultMinTtm;
    bool weighted = false;
    bool robustness = false;
    std::optional<Date> plot_date;
    std::optional<Date> plot_maturity;
    unsigned workers = 0;
};

/// File name -> contents. Built fully in memory before anything touches the disk.
using OutputTree = std::map<std::string, std::string>;

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes every file of the tree into dir; on failure, files already written are removed.
inline void write_outputs(const std::filesystem::path& dir, const OutputTree& tree) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> written;
    for (const auto& [name, contents] : tree) {
        const auto path = dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << contents;
        out.close();
        if (!out) {
            for (const auto& p : written) std::filesystem::remove(p, ec);
            std::filesystem::remove(path, ec);
            throw InputError("cannot write '" + path.string() + "'");
        }
        written.push_back(path);
    }
}

inline std::vector<OptionChain> load_option_chains(const std::vector<std::filesystem::path>& files,
                                                   const std::string& market) {
    if (files.empty()) throw InputError("no option files given");
    const std::string id = market.empty() ? files.front().stem().string() : market;
    std::map<Date, OptionChain> by_date;
    for (const auto& file : files) {
        std::vector<OptionChain> chains;
        try {
            chains = parse_option_chains(read_text_file(file), id);
        } catch (const InputError& e) {
            throw InputError(file.string() + ": " + e.what());
        }
        for (auto& chain : chains) {
            const Date d = chain.value_date;
            if (!by_date.emplace(d, std::move(chain)).second) {
                throw InputError(file.string() + ": value date " + d.iso() + " already loaded from another file");
            }
        }
    }
    std::vector<OptionChain> out;
    for (auto& [date, chain] : by_date) out.push_back(std::move(chain));
    return out;
}

inline std::map<Date, OisCurve> load_curves(const std::filesystem::path& file, const std::string& currency) {
    std::vector<OisQuoteSet> sets;
    try {
        sets = parse_ois_quote_sets(read_text_file(file));
    } catch (const InputError& e) {
        throw InputError(file.string() + ": " + e.what());
    }
    std::map<Date, OisCurve> curves;
    std::string seen;
    for (const auto& set : sets) {
        if (!currency.empty() && set.currency != currency) continue;
        if (currency.empty()) {
            if (!seen.empty() && seen != set.currency) {
                throw InputError(file.string() + ": several currencies present, select one with --currency");
            }
            seen = set.currency;
        }
        curves.emplace(set.value_date, bootstrap(set));
    }
    if (curves.empty()) throw InputError(file.string() + ": no OIS quotes" + (currency.empty() ? "" : " for " + currency));
    return curves;
}

inline Dataset load_dataset(const RunConfig& cfg) {
    return {load_option_chains(cfg.option_files, cfg.market), load_curves(cfg.ois_file, cfg.currency)};
}

namespace detail {

inline std::vector<std::pair<std::string, SpreadRegression>> base_regressions(
    const std::vector<SpreadObservation>& spreads, double min_ttm, bool weighted) {
    std::vector<std::pair<std::string, SpreadRegression>> rows;
    rows.emplace_back("base", fit_spread_panel(spreads, min_ttm, false));
    if (weighted) rows.emplace_back("weighted", fit_spread_panel(spreads, min_ttm, true));
    return rows;
}

inline const SliceFit* pick_plot_fit(const PanelEstimate& est, const Dataset& data, const RunConfig& cfg) {
    const SliceFit* best = nullptr;
    double best_gap = INFINITY;
    for (const auto& sf : est.fits) {
        const auto& f = sf.fit;
        if (cfg.plot_date && f.value_date != *cfg.plot_date) continue;
        if (!cfg.plot_date && best && f.value_date != best->fit.value_date) break;
        if (!(f.b_bar > 0.0)) continue;
        const auto curve = data.curves.find(f.value_date);
        if (curve == data.curves.end() || !curve->second.covers(f.maturity)) continue;
        if (cfg.plot_maturity) {
            if (f.maturity == *cfg.plot_maturity) return &sf;
            continue;
        }
        const double gap = std::abs(year_fraction(f.value_date, f.maturity) - 1.0);
        if (gap < best_gap) {
            best_gap = gap;
            best = &sf;
        }
    }
    if (!best && (cfg.plot_date || cfg.plot_maturity)) {
        throw InputError("no usable fit for the requested plot date/maturity");
    }
    return best;
}

inline const MaturitySlice& find_slice(const PanelEstimate& est, Date value_date, Date maturity) {
    for (const auto& chain : est.filtered) {
        if (chain.value_date != value_date) continue;
        for (const auto& slice : chain.slices) {
            if (slice.maturity == maturity) return slice;
        }
    }
    throw InputError("slice " + value_date.iso() + "/" + maturity.iso() + " not found");
}

inline void add_figures(OutputTree& tree, const PanelEstimate& est, const Dataset& data, const RunConfig& cfg,
                        const SpreadRegression& base) {
    using plot::Point;
    using plot::Series;

    // Spread against time to maturity with the pooled fit.
    {
        std::string csv = "value_date,maturity,ttm_years,spread_bp,fitted_bp\n";
        Series cloud{"spread", "#1f77b4", {}, false};
        double lo = INFINITY;
        double hi = -INFINITY;
        for (const auto& o : est.spreads) {
            if (!(o.ttm > cfg.min_ttm)) continue;
            const double fitted = base.intercept + base.slope * o.ttm;
            csv += o.value_date.iso() + ',' + o.maturity.iso() + ',' + report::num(o.ttm) + ',' +
                   report::num(o.spread / kBasisPoint) + ',' + report::num(fitted / kBasisPoint) + '\n';
            cloud.points.push_back({o.ttm, o.spread / kBasisPoint});
            lo = std::min(lo, o.ttm);
            hi = std::max(hi, o.ttm);
        }
        Series line{"fit", "#d62728", {}, true};
        if (std::isfinite(lo)) {
            line.points = {{lo, (base.intercept + base.slope * lo) / kBasisPoint},
                           {hi, (base.intercept + base.slope * hi) / kBasisPoint}};
        }
        tree["fig_spread_ttm.csv"] = csv;
        tree["fig_spread_ttm.svg"] =
            plot::render_svg("Funding spread over OIS", "time to maturity (years)", "spread (bp)", {cloud, line});
    }

    const SliceFit* chosen = pick_plot_fit(est, data, cfg);
    std::string ois_csv = "strike,f_bid,f_mid,f_ask\n";
    std::string env_csv = "strike,f_bid,f_ask,forward_bid,forward_ask\n";
    std::string title_suffix;
    Series ois_bid{"bid", "#d62728", {}, false}, ois_ask{"ask", "#1f77b4", {}, false}, ois_mid{"mid", "#2ca02c", {}, false};
    Series env_bid{"bid", "#d62728", {}, false}, env_ask{"ask", "#1f77b4", {}, false};
    Series env_fb{"forward bid", "#ff9896", {}, true}, env_fa{"forward ask", "#aec7e8", {}, true};
    if (chosen) {
        const auto& fit = chosen->fit;
        title_suffix = " " + fit.value_date.iso() + " / " + fit.maturity.iso();
        const auto& slice = find_slice(est, fit.value_date, fit.maturity);
        const double b_ois = data.curves.at(fit.value_date).discount(fit.maturity);
        for (const auto& f : strike_forwards(slice, b_ois)) {
            ois_csv += report::num(f.strike) + ',' + report::num(f.f_bid) + ',' + report::num(f.f_mid) + ',' +
                       report::num(f.f_ask) + '\n';
            ois_bid.points.push_back({f.strike, f.f_bid});
            ois_mid.points.push_back({f.strike, f.f_mid});
            ois_ask.points.push_back({f.strike, f.f_ask});
        }
        const auto env = chosen->bid_ask;
        const auto fwds = strike_forwards(slice, fit.b_bar);
        for (const auto& f : fwds) {
            env_csv += report::num(f.strike) + ',' + report::num(f.f_bid) + ',' + report::num(f.f_ask) + ',' +
                       report::num(env.f_bid) + ',' + report::num(env.f_ask) + '\n';
            env_bid.points.push_back({f.strike, f.f_bid});
            env_ask.points.push_back({f.strike, f.f_ask});
        }
        env_fb.points = {{fwds.front().strike, env.f_bid}, {fwds.back().strike, env.f_bid}};
        env_fa.points = {{fwds.front().strike, env.f_ask}, {fwds.back().strike, env.f_ask}};
    }
    tree["fig_forward_ois.csv"] = ois_csv;
    tree["fig_forward_ois.svg"] = plot::render_svg("Forward G/B_OIS + K" + title_suffix, "strike", "forward",
                                                   {ois_bid, ois_ask, ois_mid});
    tree["fig_forward_bid_ask.csv"] = env_csv;
    tree["fig_forward_bid_ask.svg"] = plot::render_svg("Forward bid/ask with implied discount" + title_suffix,
                                                       "strike", "forward", {env_bid, env_ask, env_fb, env_fa});
}

} // namespace detail

/// Filter + per-maturity discount fits.
inline OutputTree run_fit(const RunConfig& cfg) {
    const auto chains = load_option_chains(cfg.option_files, cfg.market);
    const auto est = estimate_fits(chains, cfg.filter, cfg.workers);
    return {{"fits.csv", report::fits_csv(est.fits)}, {"filter_report.csv", report::filter_report_csv(est.reports)}};
}

/// Funding spreads from a fits CSV and an OIS file.
inline OutputTree run_spreads(const std::filesystem::path& fits_file, const std::filesystem::path& ois_file,
                              const std::string& currency) {
    std::vector<ImpliedDiscountFit> fits;
    try {
        fits = report::parse_fits_csv(read_text_file(fits_file));
    } catch (const InputError& e) {
        throw InputError(fits_file.string() + ": " + e.what());
    }
    const auto curves = load_curves(ois_file, currency);
    std::vector<SpreadObservation> spreads;
    SpreadSkips skips;
    for (const auto& f : fits) {
        if (auto obs = spread_for_fit(f, curves, skips)) spreads.push_back(*obs);
    }
    return {{"spreads.csv", report::spreads_csv(spreads)}};
}

inline OutputTree run_regress(const std::filesystem::path& spreads_file, double min_ttm, bool weighted) {
    std::vector<SpreadObservation> spreads;
    try {
        spreads = report::parse_spreads_csv(read_text_file(spreads_file));
    } catch (const InputError& e) {
        throw InputError(spreads_file.string() + ": " + e.what());
    }
    return {{"regression.csv", report::regression_csv(detail::base_regressions(spreads, min_ttm, weighted))}};
}

inline OutputTree run_robustness(const RunConfig& cfg) {
    const auto data = load_dataset(cfg);
    const auto rep = robustness_suite(data, {cfg.filter, cfg.min_ttm}, cfg.workers);
    return {{"robustness.csv", report::robustness_csv(rep)},
            {"robustness_summary.csv", report::robustness_summary_csv(rep)}};
}

/// Whole pipeline: ingest, filter, fit, bootstrap, spreads, regression, descriptive table, figures.
inline OutputTree run_report(const RunConfig& cfg) {
    const auto data = load_dataset(cfg);
    const auto est = estimate_panel(data, cfg.filter, cfg.workers);
    const auto regressions = detail::base_regressions(est.spreads, cfg.min_ttm, cfg.weighted);

    OutputTree tree;
    tree["fits.csv"] = report::fits_csv(est.fits);
    tree["filter_report.csv"] = report::filter_report_csv(est.reports);
    tree["spreads.csv"] = report::spreads_csv(est.spreads);
    tree["regression.csv"] = report::regression_csv(regressions);
    tree["descriptive.csv"] = report::describe_csv(describe_panel(est.filtered));
    detail::add_figures(tree, est, data, cfg, regressions.front().second);
    if (cfg.robustness) {
        const auto rep = robustness_suite(data, {cfg.filter, cfg.min_ttm}, cfg.workers);
        tree["robustness.csv"] = report::robustness_csv(rep);
        tree["robustness_summary.csv"] = report::robustness_summary_csv(rep);
    }
    return tree;
}

} // namespace synfwd
