#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fedledger::eval {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Minimal SVG 1.1 line chart with axes, ticks and a legend.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);

}  // namespace fedledger::eval
