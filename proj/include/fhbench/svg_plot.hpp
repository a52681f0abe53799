#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fhbench {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers = true;
};

struct BarSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> height;
  std::string color = "#2ca02c";
};

struct HorizontalLine {
  double y = 0.0;
  std::string label;
  std::string color = "#d62728";
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> lines;
  std::vector<BarSeries> bars;
  std::vector<HorizontalLine> rules;
  int width = 640;
  int height = 420;
};

/// Standalone SVG document. Non-positive values are dropped on a log axis.
std::string render_svg(const PlotSpec& spec);

}  // namespace fhbench
