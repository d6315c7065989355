#include "alterego/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace alterego {
namespace io {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3f", v);
  return buffer;
}

}  // namespace

std::string render_line_plot(const std::string& title, const std::string& y_label,
                             const std::vector<PlotSeries>& series) {
  const double width = 720.0, height = 420.0;
  const double left = 70.0, right = 180.0, top = 50.0, bottom = 45.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double lo = 0.0, hi = 0.0;
  std::size_t max_len = 2;
  bool any = false;
  for (const PlotSeries& s : series) {
    max_len = std::max(max_len, s.values.size());
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      if (!any) {
        lo = hi = v;
        any = true;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!any) lo = hi = 0.0;
  if (hi - lo < 1e-12) {
    hi += 1.0;
    lo -= 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto x_at = [&](std::size_t i) {
    return left + plot_w * static_cast<double>(i) / static_cast<double>(max_len - 1);
  };
  auto y_at = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" +
         title + "</text>\n";
  out += "<text x=\"16\" y=\"" + num(top + plot_h / 2) +
         "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         num(top + plot_h / 2) + ")\">" + y_label + "</text>\n";

  // Axes plus a zero line when visible.
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"#999\"/>\n";
  if (lo < 0.0 && hi > 0.0)
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(y_at(0.0)) + "\" x2=\"" +
           num(left + plot_w) + "\" y2=\"" + num(y_at(0.0)) +
           "\" stroke=\"#ccc\" stroke-dasharray=\"4 3\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(y_at(v) + 4) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" +
           num(v) + "</text>\n";
  }

  for (std::size_t idx = 0; idx < series.size(); ++idx) {
    const char* color = kPalette[idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    for (std::size_t i = 0; i < series[idx].values.size(); ++i) {
      if (!points.empty()) points += ' ';
      points += num(x_at(i)) + "," + num(y_at(series[idx].values[i]));
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(idx);
    out += "<line x1=\"" + num(left + plot_w + 10) + "\" y1=\"" + num(ly) + "\" x2=\"" +
           num(left + plot_w + 30) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(left + plot_w + 36) + "\" y=\"" + num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + series[idx].name + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace io
}  // namespace alterego
