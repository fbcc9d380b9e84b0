#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ksos {

struct ChartSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Logarithmic y axis; non-positive points are left out.
  bool log_y = false;
  int width = 720;
  int height = 440;
};

/// Standalone SVG 1.1 line chart with axes, ticks and a legend. Non-finite
/// points are skipped. Output depends only on the inputs.
void write_line_chart(std::ostream& out, const std::vector<ChartSeries>& series, const ChartOptions& options);

}  // namespace ksos
