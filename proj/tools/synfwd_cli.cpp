#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synfwd/errors.hpp"
#include "synfwd/pipeline.hpp"
#include "synfwd/synthetic_data.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct FilterFlags {
    std::string penny = "0.1";
    std::string ratio = "0.6";
    int min_strikes = 3;
};

struct Options {
    std::vector<std::string> option_files;
    std::string ois;
    std::string market;
    std::string currency;
    FilterFlags filter;
    double min_ttm_days = 30.0;
    bool weighted = false;
    bool robustness = false;
    std::string out;
    std::string plot_date;
    std::string plot_maturity;
    unsigned threads = 0;
    std::string fits;
    std::string spreads;
};

synfwd::Decimal decimal_flag(const std::string& text, const char* flag) {
    const auto d = synfwd::Decimal::parse(text);
    if (!d) throw synfwd::InputError(std::string("invalid value for ") + flag + ": '" + text + "'");
    return *d;
}

std::optional<synfwd::Date> date_flag(const std::string& text, const char* flag) {
    if (text.empty()) return std::nullopt;
    const auto d = synfwd::Date::parse_iso(text);
    if (!d) throw synfwd::InputError(std::string("invalid date for ") + flag + ": '" + text + "'");
    return d;
}

synfwd::RunConfig to_run_config(const Options& o) {
    synfwd::RunConfig cfg;
    for (const auto& f : o.option_files) cfg.option_files.emplace_back(f);
    cfg.ois_file = o.ois;
    cfg.market = o.market;
    cfg.currency = o.currency;
    cfg.filter.penny_threshold = decimal_flag(o.filter.penny, "--penny-threshold");
    cfg.filter.max_bid_ask_ratio = decimal_flag(o.filter.ratio, "--max-spread-ratio");
    cfg.filter.min_strikes_per_maturity = o.filter.min_strikes;
    cfg.filter.validate();
    if (!(o.min_ttm_days >= 0.0)) throw synfwd::InputError("--min-ttm-days must be >= 0");
    cfg.min_ttm = o.min_ttm_days / 365.0;
    cfg.weighted = o.weighted;
    cfg.robustness = o.robustness;
    cfg.plot_date = date_flag(o.plot_date, "--plot-date");
    cfg.plot_maturity = date_flag(o.plot_maturity, "--plot-maturity");
    cfg.workers = o.threads;
    return cfg;
}

void add_input_flags(CLI::App* cmd, Options& o, bool needs_ois) {
    cmd->add_option("--options", o.option_files, "Option chain CSV files")->required()->expected(1, -1);
    if (needs_ois) cmd->add_option("--ois", o.ois, "OIS quote CSV file")->required();
    cmd->add_option("--market", o.market, "Market label (default: stem of the first options file)");
    cmd->add_option("--currency", o.currency, "OIS currency to use when the file holds several");
    cmd->add_option("--penny-threshold", o.filter.penny, "Discard options whose mid is below this price")
        ->capture_default_str();
    cmd->add_option("--max-spread-ratio", o.filter.ratio, "Discard options with (ask-bid)/ask above this")
        ->capture_default_str();
    cmd->add_option("--min-strikes", o.filter.min_strikes, "Minimum surviving strikes per maturity")
        ->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
}

void add_regression_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--min-ttm-days", o.min_ttm_days, "Keep observations with ttm strictly above this")
        ->capture_default_str();
    cmd->add_flag("--weighted", o.weighted, "Add the residual-weighted regression");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implied discount factors and funding spreads from synthetic forwards"};
    app.require_subcommand(1);

    Options o;
    synfwd::SyntheticSpec synth;
    std::string synth_start = synth.start.iso();
    double spread_bp = synth.spread / synfwd::kBasisPoint;
    double slope_bp = 0.0;

    auto* fit = app.add_subcommand("fit", "Filter option chains and fit the implied discount per maturity");
    add_input_flags(fit, o, false);
    fit->add_option("--out", o.out, "Output directory")->required();

    auto* spreads = app.add_subcommand("spreads", "Funding spreads from a fits CSV and OIS quotes");
    spreads->add_option("--fits", o.fits, "fits.csv produced by 'fit'")->required();
    spreads->add_option("--ois", o.ois, "OIS quote CSV file")->required();
    spreads->add_option("--currency", o.currency, "OIS currency to use when the file holds several");
    spreads->add_option("--out", o.out, "Output directory")->required();

    auto* regress = app.add_subcommand("regress", "Pooled spread-vs-ttm regression with t-tests");
    regress->add_option("--spreads", o.spreads, "spreads.csv produced by 'spreads'")->required();
    add_regression_flags(regress, o);
    regress->add_option("--out", o.out, "Output directory")->required();

    auto* robust = app.add_subcommand("robustness", "Re-run the regression under the robustness variants");
    add_input_flags(robust, o, true);
    add_regression_flags(robust, o);
    robust->add_option("--out", o.out, "Output directory")->required();

    auto* report = app.add_subcommand("report", "Run the whole pipeline and write every report and figure");
    add_input_flags(report, o, true);
    add_regression_flags(report, o);
    report->add_flag("--robustness", o.robustness, "Also run the robustness variants");
    report->add_option("--plot-date", o.plot_date, "Value date for the per-strike forward figures");
    report->add_option("--plot-maturity", o.plot_maturity, "Maturity for the per-strike forward figures");
    report->add_option("--out", o.out, "Output directory")->required();

    auto* gen = app.add_subcommand("synth", "Write a synthetic options + OIS dataset obeying put-call parity");
    gen->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    gen->add_option("--market", synth.market, "Market label")->capture_default_str();
    gen->add_option("--currency", synth.currency, "OIS currency")->capture_default_str();
    gen->add_option("--start-date", synth_start, "First value date")->capture_default_str();
    gen->add_option("--dates", synth.n_dates, "Number of value dates (weekdays)")->capture_default_str();
    gen->add_option("--maturities", synth.n_maturities, "Maturities per value date")->capture_default_str();
    gen->add_option("--strikes", synth.n_strikes, "Strikes per maturity")->capture_default_str();
    gen->add_option("--spread-bp", spread_bp, "Injected funding spread (bp)")->capture_default_str();
    gen->add_option("--spread-slope-bp", slope_bp, "Spread slope in bp per year of ttm")->capture_default_str();
    gen->add_option("--noise", synth.noise_sigma, "Mid-price noise sigma (index points)")->capture_default_str();
    gen->add_option("--half-width", synth.half_width, "Absolute half bid-ask width")->capture_default_str();
    gen->add_option("--half-width-rel", synth.half_width_rel, "Relative half bid-ask width")->capture_default_str();
    gen->add_option("--spot", synth.spot, "Initial index level")->capture_default_str();
    gen->add_option("--out", o.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        synfwd::OutputTree tree;
        if (*fit) {
            tree = synfwd::run_fit(to_run_config(o));
        } else if (*spreads) {
            tree = synfwd::run_spreads(o.fits, o.ois, o.currency);
        } else if (*regress) {
            if (!(o.min_ttm_days >= 0.0)) throw synfwd::InputError("--min-ttm-days must be >= 0");
            tree = synfwd::run_regress(o.spreads, o.min_ttm_days / 365.0, o.weighted);
        } else if (*robust) {
            tree = synfwd::run_robustness(to_run_config(o));
        } else if (*report) {
            tree = synfwd::run_report(to_run_config(o));
        } else if (*gen) {
            const auto start = synfwd::Date::parse_iso(synth_start);
            if (!start) throw synfwd::InputError("invalid --start-date '" + synth_start + "'");
            synth.start = *start;
            synth.spread = spread_bp * synfwd::kBasisPoint;
            synth.spread_slope = slope_bp * synfwd::kBasisPoint;
            auto files = synfwd::generate_synthetic(synth);
            tree["options.csv"] = std::move(files.options_csv);
            tree["ois.csv"] = std::move(files.ois_csv);
        }
        synfwd::write_outputs(o.out, tree);
    } catch (const synfwd::InputError& e) {
        std::cerr << "synfwd: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "synfwd: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "synfwd: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
