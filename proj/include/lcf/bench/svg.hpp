#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lcf/errors.hpp"

namespace lcf::bench {

/// One named line or scatter series for the plot.
struct SvgSeries {
    std::string label;
    std::vector<double> xs, ys;
    bool scatter = false;
};

/// Minimal self-contained line/scatter chart. No external assets.
inline void write_svg(const std::string& path, const std::string& title,
                      const std::vector<SvgSeries>& series, bool log_y = false) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const double W = 720, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;

    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    bool first = true;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            double y = s.ys[i];
            if (log_y && !(y > 0.0)) continue;
            if (log_y) y = std::log10(y);
            if (first) {
                x_lo = x_hi = s.xs[i];
                y_lo = y_hi = y;
                first = false;
            } else {
                x_lo = std::min(x_lo, s.xs[i]);
                x_hi = std::max(x_hi, s.xs[i]);
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        }
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_hi = y_lo + 1;

    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (W - ml - mr); };
    auto py = [&](double y) {
        if (log_y) y = std::log10(std::max(y, 1e-300));
        return H - mb - (y - y_lo) / (y_hi - y_lo) * (H - mt - mb);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
          "font-family=\"sans-serif\">" << title << "</text>\n";
    // axes
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
       << H - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n";
    // ticks
    for (int i = 0; i <= 5; ++i) {
        const double fx = x_lo + (x_hi - x_lo) * i / 5.0;
        const double fy = y_lo + (y_hi - y_lo) * i / 5.0;
        os << "<text x=\"" << px(fx) << "\" y=\"" << H - mb + 18
           << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">";
        {
            std::ostringstream t;
            t.precision(3);
            t << fx;
            os << t.str();
        }
        os << "</text>\n";
        os << "<text x=\"" << ml - 8 << "\" y=\"" << H - mb - (H - mt - mb) * i / 5.0 + 4
           << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">";
        {
            std::ostringstream t;
            t.precision(3);
            t << (log_y ? std::pow(10.0, fy) : fy);
            os << t.str();
        }
        os << "</text>\n";
    }
    // series
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = colors[si % 8];
        if (!s.scatter) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.xs.size(); ++i) {
                if (log_y && !(s.ys[i] > 0.0)) continue;
                os << px(s.xs[i]) << "," << py(s.ys[i]) << " ";
            }
            os << "\"/>\n";
        } else {
            for (std::size_t i = 0; i < s.xs.size(); ++i) {
                if (log_y && !(s.ys[i] > 0.0)) continue;
                os << "<circle cx=\"" << px(s.xs[i]) << "\" cy=\"" << py(s.ys[i])
                   << "\" r=\"2.5\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
            }
        }
        // legend
        const double ly = mt + 16.0 * static_cast<double>(si);
        os << "<rect x=\"" << W - mr - 150 << "\" y=\"" << ly - 9
           << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        os << "<text x=\"" << W - mr - 136 << "\" y=\"" << ly
           << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw DataError("write_svg: cannot write " + path);
    out << os.str();
}

} // namespace lcf::bench
