#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace coldpack {

// Standalone SVG emitters with the plotted data embedded as a comment table,
// so reports stay diffable and need no display stack.

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

namespace svgdetail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace svgdetail

inline std::string svg_line_chart(const std::vector<SvgSeries>& series,
                                  const std::string& title, const std::string& x_label,
                                  const std::string& y_label) {
    const double w = 640, h = 420, ml = 60, mr = 150, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    ymax *= 1.05;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<!-- data\n";
    for (const auto& s : series) {
        out << "# " << s.label << "\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << svgdetail::fmt6(s.x[i]) << "," << svgdetail::fmt6(s.y[i]) << "\n";
    }
    out << "-->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";

    // axes with a few ticks
    out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
        << h - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double yv = ymin + (ymax - ymin) * t / 4.0;
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << svgdetail::fmt(yv)
            << "</text>\n";
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml
            << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
        double xv = xmin + (xmax - xmin) * t / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << svgdetail::fmt(xv)
            << "</text>\n";
    }
    out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (mt + h - mb) / 2 << ")\">" << y_label << "</text>\n";

    double ly = mt + 10;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << svgdetail::fmt(px(s.x[i])) << "," << svgdetail::fmt(py(s.y[i])) << " ";
        out << "\"/>\n";
        out << "<line x1=\"" << w - mr + 10 << "\" y1=\"" << ly << "\" x2=\"" << w - mr + 34
            << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << w - mr + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
            << s.label << "</text>\n";
        ly += 20;
    }
    out << "</svg>\n";
    return out.str();
}

inline std::string svg_scatter(const std::vector<double>& x, const std::vector<double>& y,
                               const std::string& title, const std::string& x_label,
                               const std::string& y_label) {
    const double w = 520, h = 520, m = 60;
    double lo = 1e300, hi = -1e300;
    for (double v : x) { lo = std::min(lo, v); hi = std::max(hi, v); }
    for (double v : y) { lo = std::min(lo, v); hi = std::max(hi, v); }
    if (hi <= lo) hi = lo + 1;
    double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto p = [&](double v) { return m + (v - lo) / (hi - lo) * (w - 2 * m); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<!-- data\n# truth,prediction\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << svgdetail::fmt6(x[i]) << "," << svgdetail::fmt6(y[i]) << "\n";
    out << "-->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    out << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\""
        << h - m << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << p(lo + pad) << "\" y1=\"" << h - p(lo + pad) << "\" x2=\""
        << p(hi - pad) << "\" y2=\"" << h - p(hi - pad)
        << "\" stroke=\"#999\" stroke-dasharray=\"4\"/>\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << "<circle cx=\"" << svgdetail::fmt(p(x[i])) << "\" cy=\""
            << svgdetail::fmt(h - p(y[i])) << "\" r=\"2.4\" fill=\"steelblue\" "
               "fill-opacity=\"0.6\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"" << h - 16
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << h / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << h / 2
        << ")\">" << y_label << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace coldpack
