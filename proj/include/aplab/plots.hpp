#pragma once

#include <string>
#include <vector>

namespace aplab {

/// Minimal deterministic SVG line/scatter plotting, enough for run reports.
/// All numbers are formatted with %.6g so repeated runs emit identical bytes.
struct PlotSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    std::string color = "#1f6fb2";
    bool line = true;
    bool markers = true;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
    int width = 640;
    int height = 440;
};

void write_svg_plot(const PlotSpec& spec, const std::string& path);

} // namespace aplab
