#include "ricmatch/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace ricmatch {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#9467bd", "#2ca02c", "#d62728",
                          "#8c564b", "#17becf", "#bcbd22", "#e377c2"};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

std::string sweep_chart_svg(const SweepResult& result) {
    // Mean metric per (plan, x) over seeds.
    std::map<std::string, std::map<double, std::pair<double, std::size_t>>> series;
    for (const auto& p : result.points) {
        if (p.skipped) continue;
        auto& agg = series[p.plan_id][p.x];
        agg.first += p.metric;
        ++agg.second;
    }

    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    bool any = false;
    for (const auto& [plan, pts] : series) {
        for (const auto& [x, agg] : pts) {
            const double y = agg.first / static_cast<double>(agg.second);
            if (!any) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                any = true;
            } else {
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x);
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        }
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    auto px = [&](double x) {
        return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * (kWidth - kMarginLeft - kMarginRight);
    };
    auto py = [&](double y) {
        return kHeight - kMarginBottom -
               (y - y_lo) / (y_hi - y_lo) * (kHeight - kMarginTop - kMarginBottom);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

    // Axes.
    out << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(kHeight - kMarginBottom)
        << "\" x2=\"" << num(kWidth - kMarginRight) << "\" y2=\"" << num(kHeight - kMarginBottom)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(kMarginTop) << "\" x2=\""
        << num(kMarginLeft) << "\" y2=\"" << num(kHeight - kMarginBottom)
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = x_lo + (x_hi - x_lo) * i / 5.0;
        const double fy = y_lo + (y_hi - y_lo) * i / 5.0;
        out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(kHeight - kMarginBottom + 18)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << label(fx) << "</text>\n";
        out << "<text x=\"" << num(kMarginLeft - 6) << "\" y=\"" << num(py(fy) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << label(fy) << "</text>\n";
    }
    const char* x_title = result.sweep_kind == "data_fraction" ? "training data fraction"
                          : result.sweep_kind == "time_budget" ? "time budget (100-hoard-epoch units)"
                                                               : "training samples";
    const char* y_title = result.metric_is_accuracy ? "accuracy (%)" : "validation MAPE (%)";
    out << "<text x=\"" << num((kMarginLeft + kWidth - kMarginRight) / 2) << "\" y=\""
        << num(kHeight - 12) << "\" font-size=\"13\" text-anchor=\"middle\">" << x_title
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << num((kMarginTop + kHeight - kMarginBottom) / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num((kMarginTop + kHeight - kMarginBottom) / 2) << ")\">" << y_title << "</text>\n";

    if (!any) {
        out << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(kHeight / 2)
            << "\" font-size=\"16\" text-anchor=\"middle\">no data</text>\n";
        out << "</svg>\n";
        return out.str();
    }

    std::size_t color = 0;
    double legend_y = kMarginTop + 8;
    for (const auto& [plan, pts] : series) {
        const char* stroke =
            plan == "hoard" ? "#000000" : kPalette[color++ % (sizeof(kPalette) / sizeof(*kPalette))];
        out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, agg] : pts)
            out << num(px(x)) << ',' << num(py(agg.first / static_cast<double>(agg.second))) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << num(kWidth - kMarginRight - 150) << "\" y=\"" << num(legend_y)
            << "\" font-size=\"11\" fill=\"" << stroke << "\">" << plan << "</text>\n";
        legend_y += 14;
    }

    // Envelope drawn last, thick orange.
    if (!result.envelope.empty()) {
        out << "<polyline fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"3.5\" "
               "stroke-opacity=\"0.75\" points=\"";
        for (const auto& e : result.envelope) out << num(px(e.x)) << ',' << num(py(e.metric)) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << num(kWidth - kMarginRight - 150) << "\" y=\"" << num(legend_y)
            << "\" font-size=\"11\" fill=\"#ff7f0e\">best instance</text>\n";
    }

    out << "</svg>\n";
    return out.str();
}

}  // namespace ricmatch
