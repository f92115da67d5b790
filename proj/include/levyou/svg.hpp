#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace levyou {

struct LineSeries {
  std::string name;
  std::string color;
  std::vector<double> y;
};

/// Minimal standalone SVG line chart; non-finite points break the line.
void write_line_chart_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<double>& x,
                          const std::vector<LineSeries>& series);

}  // namespace levyou
