#pragma once

#include <string>
#include <utility>
#include <vector>

namespace btq {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), both > 0
};

/// Standalone SVG document with log-log axes, one polyline per series.
/// Non-positive points are skipped.
std::string render_loglog_svg(const std::vector<PlotSeries>& series, const std::string& title,
                              const std::string& x_label, const std::string& y_label);

}  // namespace btq
