#include "reisda/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reisda {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(2);
    ss << std::fixed << v;
    return ss.str();
}

std::string fmt_tick(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           int width, int height) {
    const double ml = 64, mr = 150, mt = 36, mb = 44;
    const double pw = width - ml - mr;
    const double ph = height - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

    // axes
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml)
        << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\"" << fmt(ml + pw)
        << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";

    for (int t = 0; t <= 4; ++t) {
        const double fx = xmin + (xmax - xmin) * t / 4.0;
        const double fy = ymin + (ymax - ymin) * t / 4.0;
        out << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << fmt(mt + ph + 16)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << fmt_tick(fx) << "</text>\n";
        out << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(py(fy) + 3)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << fmt_tick(fy) << "</text>\n";
        out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(py(fy)) << "\" x2=\"" << fmt(ml + pw)
            << "\" y2=\"" << fmt(py(fy)) << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    }

    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
        << "</text>\n";
    out << "<text x=\"14\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 14 " << mt + ph / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
        if (series[s].points) {
            for (std::size_t i = 0; i < series[s].x.size(); ++i) {
                if (!std::isfinite(series[s].y[i])) continue;
                out << "<circle cx=\"" << fmt(px(series[s].x[i])) << "\" cy=\""
                    << fmt(py(series[s].y[i])) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
            }
        } else {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < series[s].x.size(); ++i) {
                if (!std::isfinite(series[s].y[i])) continue;
                out << fmt(px(series[s].x[i])) << ',' << fmt(py(series[s].y[i])) << ' ';
            }
            out << "\"/>\n";
        }
        const double ly = mt + 16 + 16 * static_cast<double>(s);
        out << "<rect x=\"" << fmt(ml + pw + 10) << "\" y=\"" << fmt(ly - 8)
            << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << fmt(ml + pw + 26) << "\" y=\"" << fmt(ly + 1)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[s].label
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_stack(const std::vector<std::string>& charts, int width, int height) {
    std::ostringstream out;
    const int total = height * static_cast<int>(charts.size());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << total
        << "\">\n";
    for (std::size_t i = 0; i < charts.size(); ++i) {
        out << "<g transform=\"translate(0 " << height * static_cast<int>(i) << ")\">\n"
            << charts[i] << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace reisda
