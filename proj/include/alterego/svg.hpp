#pragma once

#include <string>
#include <vector>

namespace alterego {
namespace io {

/// Minimal deterministic SVG line chart; x is the series index.
struct PlotSeries {
  std::string name;
  std::vector<double> values;
};

std::string render_line_plot(const std::string& title, const std::string& y_label,
                             const std::vector<PlotSeries>& series);

}  // namespace io
}  // namespace alterego
