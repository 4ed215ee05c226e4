#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "kac/csv.hpp"
#include "kac/errors.hpp"

namespace kac {

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

// Self-contained line-plot writer: axes, ticks, optional log10 y-scale, one
// polyline per series.  Nothing external renders these; they are provenance
// artifacts next to the CSVs.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotSeries>& series, bool log_y = false) {
    const int width = 720, height = 480, margin = 64;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto ty = [log_y](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_y && !(s.y[i] > 0.0)) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double padx = 0.03 * (xmax - xmin), pady = 0.06 * (ymax - ymin);
    xmin -= padx;
    xmax += padx;
    ymin -= pady;
    ymax += pady;

    auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
    auto py = [&](double y) {
        return height - margin - (ty(y) - ymin) / (ymax - ymin) * (height - 2 * margin);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' viewBox='0 0 " << width << " " << height << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";

    // frame
    out << "<rect x='" << margin << "' y='" << margin << "' width='" << width - 2 * margin
        << "' height='" << height - 2 * margin << "' fill='none' stroke='black'/>\n";

    // ticks
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double sx = px(fx);
        out << "<line x1='" << sx << "' y1='" << height - margin << "' x2='" << sx << "' y2='"
            << height - margin + 6 << "' stroke='black'/>\n"
            << "<text x='" << sx << "' y='" << height - margin + 22
            << "' text-anchor='middle' font-size='11'>" << format_real(std::round(fx * 1e4) / 1e4)
            << "</text>\n";
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        const double sy = height - margin - (fy - ymin) / (ymax - ymin) * (height - 2 * margin);
        out << "<line x1='" << margin - 6 << "' y1='" << sy << "' x2='" << margin << "' y2='" << sy
            << "' stroke='black'/>\n"
            << "<text x='" << margin - 10 << "' y='" << sy + 4
            << "' text-anchor='end' font-size='11'>"
            << (log_y ? ("1e" + format_real(std::round(fy * 100) / 100))
                      : format_real(std::round(fy * 1e4) / 1e4))
            << "</text>\n";
    }
    out << "<text x='" << width / 2 << "' y='" << height - 12
        << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n"
        << "<text x='16' y='" << height / 2 << "' font-size='13' transform='rotate(-90 16 "
        << height / 2 << ")' text-anchor='middle'>" << ylabel << (log_y ? " (log)" : "")
        << "</text>\n";

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t s = 0; s < series.size(); ++s) {
        out << "<polyline fill='none' stroke='" << palette[s % 5] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (log_y && !(series[s].y[i] > 0.0)) continue;
            out << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
        }
        out << "'/>\n";
        out << "<text x='" << width - margin - 8 << "' y='" << margin + 18 + 16 * s
            << "' text-anchor='end' font-size='12' fill='" << palette[s % 5] << "'>"
            << series[s].name << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace kac
