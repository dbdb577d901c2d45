#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fedledger::data {

// One journal entry before encoding. The position of an entry in its table
// is its entry id.
struct Entry {
  std::vector<std::string> categorical;
  std::vector<double> numerical;
  std::string department;

  friend bool operator==(const Entry&, const Entry&) = default;
};

struct RawTable {
  std::vector<std::string> categorical_names;
  std::vector<std::string> numerical_names;
  std::string department_attribute;
  std::vector<Entry> entries;
  std::size_t malformed_rows = 0;

  // Distinct departments in first-appearance order.
  std::vector<std::string> departments() const;
  // Only the entries of the listed departments, in table order.
  RawTable filter_departments(const std::vector<std::string>& keep) const;
};

}  // namespace fedledger::data
