#pragma once

// Minimal self-contained SVG plotting: line plots and diverging heatmaps.

#include <array>
#include <string>
#include <vector>

namespace bellcool {

struct LineSeries {
  std::string label;
  std::string color;  // css color
  std::vector<double> x;
  std::vector<double> y;
};

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<LineSeries>& series);

/// values[row][col] rendered with a blue-white-red diverging colormap
/// centered on zero, rows mapped to y (bottom-up), cols to x.
void write_heatmap(const std::string& path, const std::string& title,
                   const std::string& xlabel, const std::string& ylabel, double x_min,
                   double x_max, double y_min, double y_max,
                   const std::vector<std::vector<double>>& values, double v_abs_max);

}  // namespace bellcool
