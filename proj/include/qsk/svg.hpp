#pragma once

#include <string>
#include <vector>

namespace qsk {

/// Minimal self-contained SVG line chart (no external charting dependency).
struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x, y;
};

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           int width = 900, int height = 560);

} // namespace qsk
