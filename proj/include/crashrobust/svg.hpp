#pragma once

// Minimal SVG 1.1 line plots: one polyline per series, shared axes.

#include "crashrobust/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace crashrobust {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct PlotStyle {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    int width = 640;
    int height = 400;
    int margin = 50;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
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

inline constexpr std::array<const char*, 6> palette{"#1f4e9c", "#c0392b", "#2e7d32", "#6a1b9a", "#ef6c00", "#455a64"};

} // namespace detail

inline std::string emit_svg(const std::vector<Series>& series, const PlotStyle& style = {}) {
    if (series.empty()) throw std::invalid_argument("emit_svg: no series to plot");
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty())
            throw std::invalid_argument("emit_svg: series '" + s.label + "' needs matching nonempty x and y");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) throw std::invalid_argument("emit_svg: no finite points");
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double m = style.margin;
    const double pw = style.width - 2.0 * m;
    const double ph = style.height - 2.0 * m;
    auto px = [&](double x) { return m + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return m + (y1 - y) / (y1 - y0) * ph; };
    auto f = [](double v) { return format_fixed(v, 2); };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << style.width << "\" height=\""
       << style.height << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty())
        os << "<text x=\"" << f(style.width / 2.0) << "\" y=\"" << f(m / 2.0)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << detail::xml_escape(style.title)
           << "</text>\n";
    os << "<g stroke=\"black\" stroke-width=\"1\">\n"
       << "<line x1=\"" << f(m) << "\" y1=\"" << f(m + ph) << "\" x2=\"" << f(m + pw) << "\" y2=\"" << f(m + ph)
       << "\"/>\n"
       << "<line x1=\"" << f(m) << "\" y1=\"" << f(m) << "\" x2=\"" << f(m) << "\" y2=\"" << f(m + ph) << "\"/>\n"
       << "</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0;
        const double yv = y0 + (y1 - y0) * k / 4.0;
        os << "<text x=\"" << f(px(xv)) << "\" y=\"" << f(m + ph + 14) << "\" text-anchor=\"middle\">"
           << format_fixed(xv, 3) << "</text>\n"
           << "<text x=\"" << f(m - 4) << "\" y=\"" << f(py(yv) + 3) << "\" text-anchor=\"end\">"
           << format_fixed(yv, 3) << "</text>\n";
    }
    if (!style.x_label.empty())
        os << "<text x=\"" << f(m + pw / 2) << "\" y=\"" << f(style.height - 8.0) << "\" text-anchor=\"middle\">"
           << detail::xml_escape(style.x_label) << "</text>\n";
    if (!style.y_label.empty())
        os << "<text x=\"12\" y=\"" << f(m + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 12 "
           << f(m + ph / 2) << ")\">" << detail::xml_escape(style.y_label) << "</text>\n";
    os << "</g>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        os << "<polyline fill=\"none\" stroke=\"" << detail::palette[k % detail::palette.size()]
           << "\" stroke-width=\"1.2\"";
        if (s.dashed) os << " stroke-dasharray=\"6 4\"";
        if (!s.label.empty()) os << " data-label=\"" << detail::xml_escape(s.label) << "\"";
        os << " points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!first) os << ' ';
            os << f(px(s.x[i])) << ',' << f(py(s.y[i]));
            first = false;
        }
        os << "\"/>\n";
    }
    os << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double ly = m + 12.0 * static_cast<double>(k) + 4.0;
        os << "<line x1=\"" << f(m + pw - 90) << "\" y1=\"" << f(ly) << "\" x2=\"" << f(m + pw - 70) << "\" y2=\""
           << f(ly) << "\" stroke=\"" << detail::palette[k % detail::palette.size()] << "\""
           << (series[k].dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
           << "<text x=\"" << f(m + pw - 66) << "\" y=\"" << f(ly + 3) << "\">" << detail::xml_escape(series[k].label)
           << "</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

} // namespace crashrobust
