#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace storecast {

enum class PlotKind { Line, Scatter, Histogram, Density, Heatmap };

struct PlotSeries {
  std::string label;
  std::vector<double> x;  // ignored by histogram/density (samples live in y)
  std::vector<double> y;
};

/// Data and labels for one figure. line/scatter read (x, y) pairs per
/// series; histogram/density treat each series' y as raw samples; heatmap
/// reads the row-major grid with its axis ranges (row 0 at the bottom).
struct PlotSpec {
  PlotKind kind = PlotKind::Line;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int bins = 30;  // histogram only
  std::vector<double> grid;  // heatmap only, grid_rows * grid_cols
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  double grid_x0 = 0.0, grid_x1 = 1.0;
  double grid_y0 = 0.0, grid_y1 = 1.0;
};

/// Render a standalone SVG document (axes, ticks, title, legend when more
/// than one series). The bytes are a pure function of the spec, so equal
/// specs give byte-identical files. Raises EmptySeries when there is
/// nothing to draw and rejects non-finite data.
std::string emit_svg(const PlotSpec& spec);

}  // namespace storecast
