#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "synfwd/errors.hpp"

namespace synfwd::stats {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz.
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 20000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

// ln Gamma(a + b) - ln Gamma(a) for a >= 20, by the Stirling series; avoids the
// cancellation of two large lgamma values.
inline double log_gamma_ratio(double a, double b) {
    const auto corr = [](double z) {
        const double z2 = z * z;
        return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z;
    };
    return (a - 0.5) * std::log1p(b / a) + b * std::log(a + b) - b + corr(a + b) - corr(a);
}

// ln(1 / B(a, b)).
inline double log_inverse_beta(double a, double b) {
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    if (hi >= 20.0) return log_gamma_ratio(hi, lo) - std::lgamma(lo);
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
}

// I_x(a, b) with y = 1 - x supplied separately so callers can keep it exact.
inline double incomplete_beta_xy(double a, double b, double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return 1.0;
    const double log_x = x < 0.5 ? std::log(x) : std::log1p(-y);
    const double log_y = y < 0.5 ? std::log(y) : std::log1p(-x);
    const double front = std::exp(log_inverse_beta(a, b) + a * log_x + b * log_y);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

} // namespace detail

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1].
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw NumericalError("incomplete_beta: shape parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw NumericalError("incomplete_beta: x outside [0, 1]");
    return detail::incomplete_beta_xy(a, b, x, 1.0 - x);
}

/// P(|T| >= |t|) for Student-t with dof degrees of freedom.
inline double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0.0)) throw NumericalError("student_t: degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    if (std::isnan(t)) throw NumericalError("student_t: NaN statistic");
    const double t2 = t * t;
    const double x = dof / (dof + t2);
    const double y = t2 / (dof + t2);
    return std::clamp(detail::incomplete_beta_xy(0.5 * dof, 0.5, x, y), 0.0, 1.0);
}

/// Weighted or unweighted least-squares line y = intercept + slope * x with classical inference.
struct LineFit {
    std::size_t n = 0;
    double intercept = 0.0;
    double slope = 0.0;
    double se_intercept = 0.0;
    double se_slope = 0.0;
    double t_intercept = 0.0;
    double t_slope = 0.0;
    double p_intercept = 1.0;
    double p_slope = 1.0;
    double residual_variance = 0.0; // weighted SSR / (n - 2)
    double weighted_mean_y = 0.0;
    bool perfect_fit = false;
    std::vector<double> residuals; // unweighted y - fitted
};

/// Relative residual scale below which a fit is treated as exact.
inline constexpr double kPerfectFitTolerance = 1e-9;

/// Weighted least squares. Weights are rescaled by their maximum, so a
/// constant weight vector reproduces the unweighted fit bit for bit.
/// Standard errors use sigma^2 (X'WX)^-1 with n - 2 degrees of freedom.
inline LineFit fit_line_weighted(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
    const std::size_t n = x.size();
    if (y.size() != n || w.size() != n) throw InputError("fit_line: size mismatch");
    if (n < 3) throw InputError("fit_line: need at least 3 observations, got " + std::to_string(n));

    double w_max = 0.0;
    for (double wi : w) {
        if (!(wi > 0.0) || !std::isfinite(wi)) throw InputError("fit_line: weights must be positive and finite");
        w_max = std::max(w_max, wi);
    }
    std::vector<double> wn(n);
    for (std::size_t i = 0; i < n; ++i) wn[i] = w[i] / w_max;

    double sw = 0.0;
    double swx = 0.0;
    double swy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += wn[i];
        swx += wn[i] * x[i];
        swy += wn[i] * y[i];
    }
    const double x_bar = swx / sw;
    const double y_bar = swy / sw;

    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - x_bar;
        sxx += wn[i] * dx * dx;
        sxy += wn[i] * dx * (y[i] - y_bar);
    }
    if (!(sxx > 0.0)) throw NumericalError("fit_line: zero variance in the regressor");

    LineFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = y_bar - fit.slope * x_bar;
    fit.weighted_mean_y = y_bar;

    double ssr = 0.0;
    double y_scale = 0.0;
    fit.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = (y[i] - y_bar) - fit.slope * (x[i] - x_bar);
        fit.residuals[i] = e;
        ssr += wn[i] * e * e;
        y_scale = std::max(y_scale, std::abs(y[i]));
    }
    const double dof = static_cast<double>(n - 2);
    fit.residual_variance = ssr / dof;
    fit.se_slope = std::sqrt(fit.residual_variance / sxx);
    fit.se_intercept = std::sqrt(fit.residual_variance * (1.0 / sw + x_bar * x_bar / sxx));

    const double rms = std::sqrt(ssr / sw);
    fit.perfect_fit = rms <= kPerfectFitTolerance * y_scale || ssr == 0.0;
    if (fit.perfect_fit) {
        fit.t_intercept = fit.intercept == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), fit.intercept);
        fit.t_slope = fit.slope == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), fit.slope);
        fit.p_intercept = 0.0;
        fit.p_slope = 0.0;
        return fit;
    }
    fit.t_intercept = fit.intercept / fit.se_intercept;
    fit.t_slope = fit.slope / fit.se_slope;
    fit.p_intercept = student_t_two_sided_p(fit.t_intercept, dof);
    fit.p_slope = student_t_two_sided_p(fit.t_slope, dof);
    return fit;
}

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::vector<double> ones(x.size(), 1.0);
    return fit_line_weighted(x, y, ones);
}

/// Mean, median, sample std (n - 1) and 5%/95% quantiles.
struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double std = 0.0; // 0 for a single observation
    double q05 = 0.0;
    double q95 = 0.0;
};

/// Quantile by linear interpolation between order statistics (position p * (n - 1)).
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InputError("quantile of empty sample");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline Summary summarize(std::vector<double> sample) {
    if (sample.empty()) throw InputError("summary of empty sample");
    std::sort(sample.begin(), sample.end());
    Summary s;
    s.n = sample.size();
    double sum = 0.0;
    for (double v : sample) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (double v : sample) ss += (v - s.mean) * (v - s.mean);
    s.std = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
    s.median = quantile_sorted(sample, 0.5);
    s.q05 = quantile_sorted(sample, 0.05);
    s.q95 = quantile_sorted(sample, 0.95);
    return s;
}

} // namespace synfwd::stats
