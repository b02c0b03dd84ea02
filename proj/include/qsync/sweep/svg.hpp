#pragma once

#include <string>
#include <vector>

namespace qsync::sweep {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Heatmap {
    std::vector<double> x;       ///< column coordinates
    std::vector<double> y;       ///< row coordinates
    std::vector<double> values;  ///< x-major: values[i * y.size() + j]; NaN is drawn white
    /// Optional curve drawn over the map, in the same coordinates as x and y.
    std::vector<double> overlay_x;
    std::vector<double> overlay_y;
};

struct PlotLabels {
    std::string title;
    std::string x;
    std::string y;
};

/// Grayscale map; larger values are darker. Cells are placed by index, so
/// logarithmic axes come out evenly spaced.
void write_heatmap_svg(const std::string& path, const Heatmap& map, const PlotLabels& labels);

void write_lines_svg(const std::string& path, const std::vector<Series>& series, const PlotLabels& labels);

}  // namespace qsync::sweep
