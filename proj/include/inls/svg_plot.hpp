#pragma once

#include <string>
#include <vector>

namespace inls {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// log10 y axis; non-positive values are dropped.
  bool log_y = false;
  std::vector<PlotSeries> series;
};

/// Standalone SVG document with axes, ticks, one polyline per series and a
/// legend. Non-finite points are skipped. Throws if nothing is plottable.
std::string render_svg(const PlotSpec& spec);

}  // namespace inls
