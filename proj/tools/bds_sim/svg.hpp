#pragma once

#include <string>
#include <vector>

namespace bds::tools {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x{false};
  bool log_y{false};
};

// Self-contained SVG line/scatter plot.
void emit_plot(const std::string& path, const std::vector<PlotSeries>& series,
               const PlotOptions& options);

// Event timeline: one horizontal axis, ticks for swap times (short) and
// demographic times (tall).
void emit_timeline(const std::string& path, const std::vector<double>& swap_times,
                   const std::vector<double>& demographic_times, double horizon,
                   const std::string& title);

}  // namespace bds::tools
