#pragma once

#include <string>
#include <vector>

namespace stackelberg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  // Falls back to a linear axis when some plotted value is not positive.
  bool log_y = true;
  int width = 800;
  int height = 500;
};

// Static line chart. Non-finite points are skipped; long series are thinned
// to at most 2000 points each.
std::string RenderLineChart(const std::vector<Series>& series, const ChartOptions& options);

}  // namespace stackelberg
