#pragma once

#include <string>
#include <vector>

namespace fedledger::anomaly {

// Reserved values for global anomalies. Tokens look like "SYN_<attr>_<i>"
// and never coincide with a value observed in the clean data.
struct AnomalyPool {
  std::vector<std::vector<std::string>> categorical;  // per categorical attribute
  double numeric_excess_min = 0.5;  // scaled outliers are drawn as 1 + u,
  double numeric_excess_max = 2.0;  // u in (min, max)
};

}  // namespace fedledger::anomaly
