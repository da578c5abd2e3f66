#pragma once

#include <string>
#include <vector>

namespace ssdrl::harness {

// One method's aggregate curve; `lower`/`upper` are empty when no band is drawn.
struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> mean;
    std::vector<double> lower;
    std::vector<double> upper;
};

struct PlotStyle {
    std::string title;
    std::string x_label = "episode";
    std::string y_label;
    int width = 720;
    int height = 420;
};

// Self-contained SVG: one polyline per series, a translucent band where a
// series carries bounds, axes with tick labels, and a legend.
std::string emit_svg(const std::vector<PlotSeries>& series, const PlotStyle& style);

}  // namespace ssdrl::harness
