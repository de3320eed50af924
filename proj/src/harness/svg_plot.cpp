#include "marginlab/harness/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace marginlab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

struct Series {
    std::string name;
    std::vector<double> x, y, err;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
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

struct Axis {
    double lo, hi;
    bool log;
    double map(double v, double p0, double p1) const {
        const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
        return p0 + t * (p1 - p0);
    }
    double tick_value(double t) const { return log ? std::pow(10.0, t) : t; }
};

Axis make_axis(double lo, double hi, bool log) {
    if (log) {
        lo = std::log10(lo);
        hi = std::log10(hi);
    }
    if (!(hi > lo)) {
        const double pad = std::abs(lo) > 0 ? std::abs(lo) * 0.1 : 1.0;
        lo -= pad;
        hi += pad;
    } else {
        const double pad = (hi - lo) * 0.05;
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

// Numeric group labels are stored with 17 digits; the legend needs 4.
std::string legend_label(const std::string& name) {
    char* end = nullptr;
    const double v = std::strtod(name.c_str(), &end);
    return !name.empty() && end == name.c_str() + name.size() ? fmt(v) : name;
}

}  // namespace

std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
    if (spec.y.empty()) throw std::invalid_argument("plot needs at least one y column");
    const std::size_t xc = table.column(spec.x);
    const std::size_t fc = spec.filter_column.empty() ? 0 : table.column(spec.filter_column);
    const std::size_t ec = spec.err.empty() ? 0 : table.column(spec.err);
    std::vector<Series> series;
    auto series_for = [&](const std::string& name) -> Series& {
        for (auto& s : series)
            if (s.name == name) return s;
        series.push_back({name, {}, {}, {}});
        return series.back();
    };
    for (std::size_t r = 0; r < table.rows(); ++r) {
        if (!spec.filter_column.empty() && table.cell(r, fc) != spec.filter_value) continue;
        const double x = table.number(r, xc);
        if (!spec.group.empty()) {
            Series& s = series_for(table.cell(r, table.column(spec.group)));
            s.x.push_back(x);
            s.y.push_back(table.number(r, table.column(spec.y.front())));
            s.err.push_back(spec.err.empty() ? 0.0 : table.number(r, ec));
        } else {
            for (std::size_t k = 0; k < spec.y.size(); ++k) {
                Series& s = series_for(spec.y[k]);
                s.x.push_back(x);
                s.y.push_back(table.number(r, table.column(spec.y[k])));
                s.err.push_back(spec.err.empty() || k > 0 ? 0.0 : table.number(r, ec));
            }
        }
    }

    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], spec.log_x) || !usable(s.y[i], spec.log_y)) continue;
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            const double e = std::isfinite(s.err[i]) ? s.err[i] : 0.0;
            const double lo = spec.log_y ? s.y[i] : s.y[i] - e;
            ylo = std::min(ylo, lo);
            yhi = std::max(yhi, s.y[i] + e);
        }
    }
    if (!std::isfinite(xlo)) xlo = xhi = spec.log_x ? 1.0 : 0.0;
    if (!std::isfinite(ylo)) ylo = yhi = spec.log_y ? 1.0 : 0.0;
    const Axis ax = make_axis(xlo, xhi, spec.log_x);
    const Axis ay = make_axis(ylo, yhi, spec.log_y);
    const double px0 = kLeft, px1 = kWidth - kRight, py0 = kHeight - kBottom, py1 = kTop;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
           "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
           xml_escape(spec.title) + "</text>\n";
    out += "<line x1=\"" + fmt(px0) + "\" y1=\"" + fmt(py0) + "\" x2=\"" + fmt(px1) + "\" y2=\"" + fmt(py0) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + fmt(px0) + "\" y1=\"" + fmt(py0) + "\" x2=\"" + fmt(px0) + "\" y2=\"" + fmt(py1) +
           "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double fx = ax.lo + (ax.hi - ax.lo) * t / 5.0;
        const double fy = ay.lo + (ay.hi - ay.lo) * t / 5.0;
        const double sx = px0 + (px1 - px0) * t / 5.0;
        const double sy = py0 + (py1 - py0) * t / 5.0;
        out += "<line x1=\"" + fmt(sx) + "\" y1=\"" + fmt(py0) + "\" x2=\"" + fmt(sx) + "\" y2=\"" + fmt(py0 + 4) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(sx) + "\" y=\"" + fmt(py0 + 16) + "\" text-anchor=\"middle\">" +
               fmt(ax.tick_value(fx)) + "</text>\n";
        out += "<line x1=\"" + fmt(px0 - 4) + "\" y1=\"" + fmt(sy) + "\" x2=\"" + fmt(px0) + "\" y2=\"" + fmt(sy) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(px0 - 6) + "\" y=\"" + fmt(sy + 4) + "\" text-anchor=\"end\">" +
               fmt(ay.tick_value(fy)) + "</text>\n";
    }
    out += "<text x=\"" + fmt((px0 + px1) / 2) + "\" y=\"" + fmt(kHeight - 12) + "\" text-anchor=\"middle\">" +
           xml_escape(spec.x) + "</text>\n";
    const std::string ylabel = spec.group.empty() && spec.y.size() > 1 ? "value" : spec.y.front();
    out += "<text x=\"16\" y=\"" + fmt((py0 + py1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt((py0 + py1) / 2) + ")\">" + xml_escape(ylabel) + "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        const std::string color = kPalette[k % std::size(kPalette)];
        std::string points;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], spec.log_x) || !usable(s.y[i], spec.log_y)) continue;
            const double sx = ax.map(s.x[i], px0, px1);
            const double sy = ay.map(s.y[i], py0, py1);
            points += fmt(sx) + "," + fmt(sy) + " ";
            if (s.err[i] > 0.0 && std::isfinite(s.err[i])) {
                const double lo = s.y[i] - s.err[i];
                const double e0 = usable(lo, spec.log_y) ? ay.map(lo, py0, py1) : py0;
                const double e1 = ay.map(s.y[i] + s.err[i], py0, py1);
                out += "<line x1=\"" + fmt(sx) + "\" y1=\"" + fmt(e0) + "\" x2=\"" + fmt(sx) + "\" y2=\"" + fmt(e1) +
                       "\" stroke=\"" + color + "\"/>\n";
            }
        }
        out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        const double ly = py1 + 16.0 * static_cast<double>(k);
        out += "<line x1=\"" + fmt(px1 + 10) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(px1 + 30) + "\" y2=\"" + fmt(ly) +
               "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fmt(px1 + 34) + "\" y=\"" + fmt(ly + 4) + "\">" + xml_escape(legend_label(s.name)) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace marginlab
