#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "synfwd/date.hpp"
#include "synfwd/decimal.hpp"
#include "synfwd/errors.hpp"
#include "synfwd/market_data.hpp"

namespace synfwd {

/// Long call / short put at one strike. Exact decimal arithmetic.
struct SyntheticForwardQuote {
    Decimal strike;
    Decimal g_bid; // call_bid - put_ask
    Decimal g_ask; // call_ask - put_bid
    Decimal g_mid; // (g_bid + g_ask) / 2
};

/// Quality markers on a discount fit; they never abort the pipeline.
enum FitFlag : unsigned {
    kFitOk = 0,
    kNonPositiveDiscount = 1u << 0,
    kDiscountAboveBound = 1u << 1,
    kCrossedForward = 1u << 2,
};

inline constexpr double kDiscountUpperBound = 1.2;

inline std::string fit_flags_to_string(unsigned flags) {
    std::string out;
    const auto add = [&](const char* name) {
        if (!out.empty()) out += '|';
        out += name;
    };
    if (flags & kNonPositiveDiscount) add("non_positive_discount");
    if (flags & kDiscountAboveBound) add("discount_above_bound");
    if (flags & kCrossedForward) add("crossed_forward");
    return out;
}

inline unsigned fit_flags_from_string(std::string_view s) {
    unsigned flags = kFitOk;
    std::size_t start = 0;
    while (start < s.size()) {
        auto end = s.find('|', start);
        if (end == std::string_view::npos) end = s.size();
        const auto tok = s.substr(start, end - start);
        if (tok == "non_positive_discount") flags |= kNonPositiveDiscount;
        else if (tok == "discount_above_bound") flags |= kDiscountAboveBound;
        else if (tok == "crossed_forward") flags |= kCrossedForward;
        else if (!tok.empty()) throw InputError("unknown fit flag '" + std::string(tok) + "'");
        start = end + 1;
    }
    return flags;
}

struct StrikeResidual {
    double strike;
    double residual;
};

struct ImpliedDiscountFit {
    Date value_date;
    Date maturity;
    double b_bar = 0.0;   // market-implied discount factor
    double forward = 0.0; // strike-independent forward price
    double r_squared = 0.0;
    std::vector<StrikeResidual> residuals;
    std::size_t n_strikes = 0;
    unsigned flags = kFitOk;
};

inline std::vector<SyntheticForwardQuote> synth_forwards(const MaturitySlice& slice) {
    std::vector<SyntheticForwardQuote> out;
    out.reserve(slice.quotes.size());
    for (const auto& q : slice.quotes) {
        if (!q.complete()) {
            throw InputError("synthetic forward at strike " + q.strike.to_string() + ", maturity " +
                             slice.maturity.iso() + ": missing quote side");
        }
        SyntheticForwardQuote g;
        g.strike = q.strike;
        g.g_bid = *q.call_bid - *q.put_ask;
        g.g_ask = *q.call_ask - *q.put_bid;
        g.g_mid = (g.g_bid + g.g_ask).half();
        out.push_back(g);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.strike < b.strike; });
    return out;
}

/// Least-squares fit of G_i = -B K_i + B F. Requires at least two distinct strikes.
inline ImpliedDiscountFit fit_implied_discount(std::span<const double> strikes, std::span<const double> g_mid,
                                               Date value_date, Date maturity) {
    const std::size_t n = strikes.size();
    if (n != g_mid.size()) throw InputError("fit_implied_discount: strike/price size mismatch");
    if (n < 2) throw InputError("fit_implied_discount: need at least two strikes");

    double k_mean = 0.0;
    double g_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        k_mean += strikes[i];
        g_mean += g_mid[i];
    }
    k_mean /= static_cast<double>(n);
    g_mean /= static_cast<double>(n);

    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dk = strikes[i] - k_mean;
        const double dg = g_mid[i] - g_mean;
        sxx += dk * dk;
        sxy += dk * dg;
        syy += dg * dg;
    }
    if (!(sxx > 0.0)) {
        throw NumericalError("degenerate regression at maturity " + maturity.iso() + ": zero strike variance");
    }

    ImpliedDiscountFit fit;
    fit.value_date = value_date;
    fit.maturity = maturity;
    fit.n_strikes = n;
    fit.b_bar = -sxy / sxx;
    fit.forward = g_mean / fit.b_bar + k_mean;

    double ssr = 0.0;
    fit.residuals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        // G_i + B K_i - B F, written around the sample means
        const double e = (g_mid[i] - g_mean) + fit.b_bar * (strikes[i] - k_mean);
        ssr += e * e;
        fit.residuals.push_back({strikes[i], e});
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;

    if (!(fit.b_bar > 0.0)) fit.flags |= kNonPositiveDiscount;
    else if (fit.b_bar > kDiscountUpperBound) fit.flags |= kDiscountAboveBound;
    return fit;
}

struct StrikeForward {
    double strike;
    double f_bid;
    double f_mid;
    double f_ask;
};

/// Per-strike forwards G/discount + K for the bid, mid and ask synthetic forwards.
inline std::vector<StrikeForward> strike_forwards(const MaturitySlice& slice, double discount) {
    if (!(discount > 0.0)) throw InputError("strike_forwards: discount must be positive");
    std::vector<StrikeForward> out;
    for (const auto& g : synth_forwards(slice)) {
        const double k = g.strike.to_double();
        out.push_back({k, g.g_bid.to_double() / discount + k, g.g_mid.to_double() / discount + k,
                       g.g_ask.to_double() / discount + k});
    }
    return out;
}

struct ForwardBidAsk {
    double f_bid = 0.0; // highest per-strike forward bid
    double f_ask = 0.0; // lowest per-strike forward ask
    bool crossed = false;
};

inline ForwardBidAsk forward_bid_ask(const MaturitySlice& slice, double b_bar) {
    if (slice.quotes.empty()) throw InputError("forward_bid_ask: empty slice at maturity " + slice.maturity.iso());
    const auto fwds = strike_forwards(slice, b_bar);
    ForwardBidAsk out{fwds.front().f_bid, fwds.front().f_ask, false};
    for (const auto& f : fwds) {
        out.f_bid = std::max(out.f_bid, f.f_bid);
        out.f_ask = std::min(out.f_ask, f.f_ask);
    }
    out.crossed = out.f_bid > out.f_ask;
    return out;
}

/// Discount fit on the mid synthetic forwards of one filtered slice, with the forward bid/ask envelope.
struct SliceFit {
    ImpliedDiscountFit fit;
    ForwardBidAsk bid_ask;
};

inline SliceFit fit_slice(const MaturitySlice& slice, Date value_date) {
    const auto g = synth_forwards(slice);
    std::vector<double> k(g.size());
    std::vector<double> mid(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        k[i] = g[i].strike.to_double();
        mid[i] = g[i].g_mid.to_double();
    }
    SliceFit out{fit_implied_discount(k, mid, value_date, slice.maturity), {}};
    if (out.fit.b_bar > 0.0) {
        out.bid_ask = forward_bid_ask(slice, out.fit.b_bar);
        if (out.bid_ask.crossed) out.fit.flags |= kCrossedForward;
    }
    return out;
}

} // namespace synfwd
