#include "nlqfi/app/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace nlqfi::app {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 80, kRight = 150, kTop = 40, kBottom = 60;
const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo, hi;
    bool log;

    double map(double v) const {
        const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
        return t;
    }
    bool valid(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

Axis make_axis(const std::vector<const std::vector<double>*>& data, bool log) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* v : data) {
        for (double x : *v) {
            if (!std::isfinite(x) || (log && x <= 0.0)) continue;
            const double t = log ? std::log10(x) : x;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    if (log) {
        lo = std::floor(lo);
        hi = std::ceil(hi);
    } else {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

std::vector<std::pair<double, std::string>> ticks(const Axis& a) {
    std::vector<std::pair<double, std::string>> out;
    if (a.log) {
        const int step = std::max(1, static_cast<int>(std::ceil((a.hi - a.lo) / 8.0)));
        for (int e = static_cast<int>(a.lo); e <= static_cast<int>(a.hi); e += step) {
            out.emplace_back(std::pow(10.0, e), fmt::format("1e{}", e));
        }
    } else {
        const double raw = (a.hi - a.lo) / 6.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        const double step = raw / mag < 2 ? 2 * mag : raw / mag < 5 ? 5 * mag : 10 * mag;
        for (double v = std::ceil(a.lo / step) * step; v <= a.hi + 1e-9 * step; v += step) {
            out.emplace_back(v, fmt::format("{:.3g}", std::abs(v) < 1e-12 * step ? 0.0 : v));
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : spec.series) {
        xs.push_back(&s.x);
        ys.push_back(&s.y);
    }
    const Axis ax = make_axis(xs, spec.log_x);
    const Axis ay = make_axis(ys, spec.log_y);
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + ax.map(v) * pw; };
    auto py = [&](double v) { return kTop + (1.0 - ay.map(v)) * ph; };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight);
    svg += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", kLeft + pw / 2,
                       escape(spec.title));
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop, pw, ph);

    for (const auto& [v, label] : ticks(ax)) {
        const double x = px(v);
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n", x, kTop, kTop + ph);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x, kTop + ph + 16, label);
    }
    for (const auto& [v, label] : ticks(ay)) {
        const double y = py(v);
        svg += fmt::format("<line x1=\"{1}\" y1=\"{0:.2f}\" x2=\"{2}\" y2=\"{0:.2f}\" stroke=\"#ddd\"/>\n", y, kLeft, kLeft + pw);
        svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6, y + 4, label);
    }
    if (!spec.log_y && ay.lo < 0.0 && ay.hi > 0.0) {
        svg += fmt::format("<line x1=\"{1}\" y1=\"{0:.2f}\" x2=\"{2}\" y2=\"{0:.2f}\" stroke=\"black\" stroke-dasharray=\"2,2\"/>\n",
                           py(0.0), kLeft, kLeft + pw);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2, kHeight - 16,
                       escape(spec.x_label));
    svg += fmt::format("<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
                       kTop + ph / 2, escape(spec.y_label));

    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        const auto& ser = spec.series[s];
        const char* colour = kColours[s % std::size(kColours)];
        const std::string dash = ser.dashed ? " stroke-dasharray=\"6,4\"" : "";
        std::string pts;
        auto flush = [&] {
            if (!pts.empty()) {
                svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n", colour, dash, pts);
            }
            pts.clear();
        };
        for (std::size_t k = 0; k < ser.x.size(); ++k) {
            if (!ax.valid(ser.x[k]) || !ay.valid(ser.y[k])) {
                flush();
                continue;
            }
            pts += fmt::format("{:.2f},{:.2f} ", px(ser.x[k]), py(ser.y[k]));
        }
        flush();
        for (std::size_t k = 0; k < ser.marked.size() && k < ser.x.size(); ++k) {
            if (ser.marked[k] && ax.valid(ser.x[k]) && ay.valid(ser.y[k])) {
                svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"none\" stroke=\"{}\"/>\n", px(ser.x[k]),
                                   py(ser.y[k]), colour);
            }
        }
        const double ly = kTop + 14 + 18 * static_cast<double>(s);
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"{4}/>\n",
                           kLeft + pw + 10, ly, kLeft + pw + 34, colour, dash);
        svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", kLeft + pw + 40, ly + 4, escape(ser.label));
    }
    svg += "</svg>\n";
    return svg;
}

void write_svg(const std::string& path, const PlotSpec& spec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << render_svg(spec);
}

}  // namespace nlqfi::app
