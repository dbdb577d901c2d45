#include "fedledger/data/table.hpp"

#include <algorithm>
#include <unordered_set>

namespace fedledger::data {

std::vector<std::string> RawTable::departments() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& e : entries)
    if (seen.insert(e.department).second) out.push_back(e.department);
  return out;
}

RawTable RawTable::filter_departments(const std::vector<std::string>& keep) const {
  RawTable out;
  out.categorical_names = categorical_names;
  out.numerical_names = numerical_names;
  out.department_attribute = department_attribute;
  out.malformed_rows = malformed_rows;
  const std::unordered_set<std::string> wanted(keep.begin(), keep.end());
  for (const auto& e : entries)
    if (wanted.contains(e.department)) out.entries.push_back(e);
  return out;
}

}  // namespace fedledger::data
