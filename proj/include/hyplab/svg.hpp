#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hyplab::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<std::pair<double, double>> x_range;
  std::optional<std::pair<double, double>> y_range;
  bool equal_aspect = false;
  bool zero_line = false;
};

/// Multi-series polyline plot with axes, ticks and a legend. Points outside
/// the y-range are clipped by the plot area.
std::string line_plot(const std::vector<Series>& series, const PlotSpec& spec);

/// "Nice" tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target = 6);

}  // namespace hyplab::svg
