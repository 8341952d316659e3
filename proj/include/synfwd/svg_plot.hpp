#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace synfwd::plot {

struct Point {
    double x;
    double y;
};

struct Series {
    std::string label;
    std::string color;
    std::vector<Point> points;
    bool as_line = false; // polyline through the points instead of markers
};

struct Axis {
    double lo;
    double hi;
};

/// Data range padded by 5% on each side; a degenerate range is widened to +/- 1 (or +/- 5% of |value|).
inline Axis axis_for(const std::vector<Series>& series, bool use_x) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            const double v = use_x ? p.x : p.y;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) return {0.0, 1.0};
    if (hi - lo <= 0.0) {
        const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
        return {lo - pad, hi + pad};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

/// Static scatter/line chart, 720x480, five ticks per axis.
inline std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<Series>& series) {
    constexpr double kWidth = 720.0;
    constexpr double kHeight = 480.0;
    constexpr double kLeft = 80.0;
    constexpr double kRight = 160.0;
    constexpr double kTop = 40.0;
    constexpr double kBottom = 60.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    const Axis ax = axis_for(series, true);
    const Axis ay = axis_for(series, false);
    const auto sx = [&](double x) { return kLeft + (x - ax.lo) / (ax.hi - ax.lo) * plot_w; };
    const auto sy = [&](double y) { return kTop + plot_h - (y - ay.lo) / (ay.hi - ay.lo) * plot_h; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" viewBox=\"0 0 720 480\">\n";
    out += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt("%.1f", kLeft + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           title + "</text>\n";
    out += "<rect x=\"" + fmt("%.1f", kLeft) + "\" y=\"" + fmt("%.1f", kTop) + "\" width=\"" + fmt("%.1f", plot_w) +
           "\" height=\"" + fmt("%.1f", plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double xv = ax.lo + (ax.hi - ax.lo) * i / 4.0;
        const double yv = ay.lo + (ay.hi - ay.lo) * i / 4.0;
        out += "<text x=\"" + fmt("%.1f", sx(xv)) + "\" y=\"" + fmt("%.1f", kTop + plot_h + 18) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + fmt("%.4g", xv) + "</text>\n";
        out += "<text x=\"" + fmt("%.1f", kLeft - 6) + "\" y=\"" + fmt("%.1f", sy(yv) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + fmt("%.6g", yv) + "</text>\n";
        out += "<line x1=\"" + fmt("%.1f", kLeft) + "\" y1=\"" + fmt("%.1f", sy(yv)) + "\" x2=\"" +
               fmt("%.1f", kLeft + plot_w) + "\" y2=\"" + fmt("%.1f", sy(yv)) + "\" stroke=\"#dddddd\"/>\n";
    }
    out += "<text x=\"" + fmt("%.1f", kLeft + plot_w / 2) + "\" y=\"" + fmt("%.1f", kHeight - 16) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + x_label + "</text>\n";
    out += "<text x=\"18\" y=\"" + fmt("%.1f", kTop + plot_h / 2) + "\" text-anchor=\"middle\" font-size=\"13\" " +
           "transform=\"rotate(-90 18 " + fmt("%.1f", kTop + plot_h / 2) + ")\">" + y_label + "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        if (s.as_line) {
            out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\" points=\"";
            for (const auto& p : s.points) out += fmt("%.2f", sx(p.x)) + ',' + fmt("%.2f", sy(p.y)) + ' ';
            out += "\"/>\n";
        } else {
            for (const auto& p : s.points) {
                out += "<circle cx=\"" + fmt("%.2f", sx(p.x)) + "\" cy=\"" + fmt("%.2f", sy(p.y)) +
                       "\" r=\"2.5\" fill=\"" + s.color + "\"/>\n";
            }
        }
        const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
        out += "<rect x=\"" + fmt("%.1f", kWidth - kRight + 14) + "\" y=\"" + fmt("%.1f", ly - 9) +
               "\" width=\"10\" height=\"10\" fill=\"" + s.color + "\"/>\n";
        out += "<text x=\"" + fmt("%.1f", kWidth - kRight + 30) + "\" y=\"" + fmt("%.1f", ly) +
               "\" font-size=\"12\">" + s.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace synfwd::plot
