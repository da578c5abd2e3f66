#include "ssdrl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ssdrl/errors.hpp"

namespace ssdrl::harness {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            const double d = std::max(std::abs(lo) * 0.05, 0.5);
            lo -= d;
            hi += d;
        }
    }
};

}  // namespace

std::string emit_svg(const std::vector<PlotSeries>& series, const PlotStyle& style) {
    if (series.empty()) {
        throw DomainError("nothing to plot");
    }
    Range xr;
    Range yr;
    for (const auto& s : series) {
        if (s.x.size() != s.mean.size()) {
            throw SizeMismatchError(s.x.size(), s.mean.size());
        }
        if (!s.lower.empty() && (s.lower.size() != s.x.size() || s.upper.size() != s.x.size())) {
            throw SizeMismatchError(s.lower.size(), s.x.size());
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xr.add(s.x[i]);
            yr.add(s.mean[i]);
            if (!s.lower.empty()) {
                yr.add(s.lower[i]);
                yr.add(s.upper[i]);
            }
        }
    }
    xr.pad();
    yr.pad();

    const double left = 70;
    const double right = 160;
    const double top = 40;
    const double bottom = 50;
    const double w = style.width;
    const double h = style.height;
    const double pw = w - left - right;
    const double ph = h - top - bottom;
    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) + "\" height=\"" +
           std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
           std::to_string(style.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(style.title) +
           "</text>\n";

    // axes and ticks
    out += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(left + pw) + "\" y2=\"" +
           num(top + ph) + "\"/>\n";
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(top + ph) +
           "\"/>\n";
    out += "</g>\n<g class=\"ticks\">\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = xr.lo + (xr.hi - xr.lo) * k / 5.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * k / 5.0;
        out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(top + ph + 16) + "\" text-anchor=\"middle\">" +
               tick_label(xv) + "</text>\n";
        out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" +
               tick_label(yv) + "</text>\n";
    }
    out += "</g>\n";
    out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(h - 12) + "\" text-anchor=\"middle\">" +
           escape(style.x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           num(top + ph / 2) + ")\">" + escape(style.y_label) + "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const std::string color = kPalette[k % std::size(kPalette)];
        if (!s.lower.empty()) {
            std::string pts;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                pts += num(px(s.x[i])) + "," + num(py(s.upper[i])) + " ";
            }
            for (std::size_t i = s.x.size(); i-- > 0;) {
                pts += num(px(s.x[i])) + "," + num(py(s.lower[i])) + " ";
            }
            out += "<polygon class=\"band\" fill=\"" + color + "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"" +
                   pts + "\"/>\n";
        }
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            pts += num(px(s.x[i])) + "," + num(py(s.mean[i])) + " ";
        }
        out += "<polyline class=\"series\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" +
               pts + "\"/>\n";
    }

    out += "<g class=\"legend\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double y = top + 10 + 18.0 * static_cast<double>(k);
        const std::string color = kPalette[k % std::size(kPalette)];
        out += "<line x1=\"" + num(left + pw + 12) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left + pw + 32) +
               "\" y2=\"" + num(y) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text class=\"legend-entry\" x=\"" + num(left + pw + 38) + "\" y=\"" + num(y + 4) + "\">" +
               escape(series[k].name) + "</text>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

}  // namespace ssdrl::harness
