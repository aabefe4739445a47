#pragma once

#include <string>
#include <vector>

namespace nlqfi::app {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<bool> marked;  // drawn as open circles (e.g. flagged dips)
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = true;
    bool log_y = true;
    std::vector<Series> series;
};

/// Minimal SVG line plot. Non-finite points (and non-positive ones on log axes) break
/// the polyline.
std::string render_svg(const PlotSpec& spec);
void write_svg(const std::string& path, const PlotSpec& spec);

}  // namespace nlqfi::app
