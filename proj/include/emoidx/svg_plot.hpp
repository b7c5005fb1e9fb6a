#pragma once

#include <string>
#include <vector>

#include "emoidx/calendar.hpp"

namespace emoidx {

struct PlotLine {
    std::string label;
    std::string color;  // empty: chosen from the palette by label
    DayValues values;
};

struct PlotOptions {
    std::string title;
    std::string y_label;
    int width = 960;
    int height = 480;
};

// Standalone SVG line chart with axes, ticks and a legend. Gaps in a series
// break its line.
std::string render_svg(const std::vector<PlotLine>& lines, const PlotOptions& options);

// Fixed color per emotion label; other labels get a neutral palette color.
std::string color_for(const std::string& label, std::size_t fallback_index);

} // namespace emoidx
