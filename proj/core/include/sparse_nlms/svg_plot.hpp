#ifndef SPARSE_NLMS_SVG_PLOT_HPP
#define SPARSE_NLMS_SVG_PLOT_HPP

#include <string>
#include <vector>

namespace sparse_nlms {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
    bool markers_only = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    int width = 720;
    int height = 480;
    int right_margin = 170;  // legend space
    /// Series longer than this are decimated evenly before drawing.
    std::size_t max_points = 1000;
};

/// Minimal standalone SVG line chart. Non-finite points are dropped.
std::string render_svg(const PlotSpec& spec);

}  // namespace sparse_nlms

#endif  // SPARSE_NLMS_SVG_PLOT_HPP
