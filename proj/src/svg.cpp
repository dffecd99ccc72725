#include "fsbp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fsbp {

namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 70.0, kRight = 180.0, kTop = 40.0, kBottom = 55.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double transform(double v) const { return log ? std::log10(v) : v; }
    double fraction(double v) const {
        const double t = transform(v);
        return (t - lo) / (hi - lo);
    }
};

Axis make_axis(double min_v, double max_v, bool log) {
    Axis ax;
    ax.log = log;
    ax.lo = log ? std::log10(min_v) : min_v;
    ax.hi = log ? std::log10(max_v) : max_v;
    if (ax.hi - ax.lo < 1e-12) {
        ax.lo -= 0.5;
        ax.hi += 0.5;
    } else {
        const double pad = 0.05 * (ax.hi - ax.lo);
        ax.lo -= pad;
        ax.hi += pad;
    }
    return ax;
}

std::vector<double> axis_ticks(const Axis& ax) {
    std::vector<double> ticks;
    if (ax.log) {
        for (int d = static_cast<int>(std::ceil(ax.lo)); d <= static_cast<int>(std::floor(ax.hi));
             ++d)
            ticks.push_back(std::pow(10.0, d));
        if (ticks.empty()) ticks.push_back(std::pow(10.0, 0.5 * (ax.lo + ax.hi)));
    } else {
        const double span = ax.hi - ax.lo;
        const double raw = span / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        if (raw / mag >= 5.0)
            step = 5.0 * mag;
        else if (raw / mag >= 2.0)
            step = 2.0 * mag;
        for (double v = std::ceil(ax.lo / step) * step; v <= ax.hi + 1e-12 * span; v += step)
            ticks.push_back(v);
    }
    return ticks;
}

} // namespace

std::string emit_svg(const std::vector<Series>& series, const AxesSpec& axes) {
    if (series.empty()) throw std::invalid_argument("emit_svg: no series");
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw std::invalid_argument("emit_svg: series '" + s.name +
                                        "' is empty or ragged");
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (axes.x_log && !(s.x[i] > 0.0))
                throw std::invalid_argument("emit_svg: non-positive x on log axis in '" +
                                            s.name + "'");
            if (axes.y_log && !(s.y[i] > 0.0))
                throw std::invalid_argument("emit_svg: non-positive y on log axis in '" +
                                            s.name + "'");
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }

    const Axis ax = make_axis(x_min, x_max, axes.x_log);
    const Axis ay = make_axis(y_min, y_max, axes.y_log);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + ax.fraction(v) * plot_w; };
    auto py = [&](double v) { return kHeight - kBottom - ay.fraction(v) * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    if (!axes.title.empty())
        out << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"16\">"
            << axes.title << "</text>\n";

    // frame
    out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(plot_w)
        << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double tick : axis_ticks(ax)) {
        const double x = px(tick);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
            << num(x) << "\" y2=\"" << num(kHeight - kBottom + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(x) << "\" y=\"" << num(kHeight - kBottom + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << sci(tick) << "</text>\n";
    }
    for (double tick : axis_ticks(ay)) {
        const double y = py(tick);
        out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft)
            << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << sci(tick)
            << "</text>\n";
    }

    if (!axes.x_label.empty())
        out << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 12)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
            << axes.x_label << "</text>\n";
    if (!axes.y_label.empty())
        out << "<text x=\"18\" y=\"" << num(kTop + plot_h / 2)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
               "transform=\"rotate(-90 18 "
            << num(kTop + plot_h / 2) << ")\">" << axes.y_label << "</text>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < series[s].x.size(); ++i)
            out << (i ? " " : "") << num(px(series[s].x[i])) << ',' << num(py(series[s].y[i]));
        out << "\"/>\n";
        const double ly = kTop + 18.0 * static_cast<double>(s) + 10.0;
        out << "<line x1=\"" << num(kWidth - kRight + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
            << num(kWidth - kRight + 36) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << num(kWidth - kRight + 42) << "\" y=\"" << num(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].name
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_svg(const std::string& path, const std::vector<Series>& series,
               const AxesSpec& axes) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << emit_svg(series, axes);
}

} // namespace fsbp
