#pragma once

#include <string>
#include <vector>

namespace eveopt::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  bool log_y = false;
  std::string title;
  std::string x_label = "epoch";
  std::string y_label = "training loss";
  int width = 800;
  int height = 500;
};

/// Self-contained SVG document: axes with ticks, one polyline per series
/// (drawn and listed in the order given), and a legend. Output depends only
/// on the inputs. Throws std::invalid_argument for no series or empty data.
std::string render_line_chart(const std::vector<Series>& series, const ChartOptions& options);

std::string xml_escape(const std::string& s);

}  // namespace eveopt::cli
