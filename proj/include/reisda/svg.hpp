#pragma once

#include <string>
#include <vector>

namespace reisda {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool points = false;  // draw markers instead of a connected line
};

// Minimal self-contained line/scatter chart; no plotting dependency.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           int width = 860, int height = 420);

// Stacks several charts into one document.
std::string svg_stack(const std::vector<std::string>& charts, int width = 860, int height = 420);

}  // namespace reisda
