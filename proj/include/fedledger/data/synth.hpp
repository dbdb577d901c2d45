#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fedledger/data/table.hpp"

namespace fedledger::data {

struct SynthSpec {
  std::size_t n_departments = 5;
  std::size_t rows_per_department = 2000;
  std::size_t n_categorical = 4;
  std::size_t n_numerical = 1;
  std::size_t cardinality = 8;  // shared alphabet size per categorical attribute
  std::size_t prototypes = 3;   // posting patterns per department
  double prototype_fidelity = 0.8;
  std::uint64_t seed = 0;
};

// What the generator drew, kept for tests and diagnostics.
struct SynthParameters {
  // [department][attribute][value] -> probability of the department marginal
  std::vector<std::vector<std::vector<double>>> marginals;
  // [department][prototype][attribute] -> value index
  std::vector<std::vector<std::vector<std::size_t>>> prototypes;
  std::vector<std::vector<double>> prototype_weights;
  // [department][numeric attribute] -> centre of the amount range
  std::vector<std::vector<double>> numeric_centres;
};

struct SynthResult {
  RawTable table;
  SynthParameters parameters;
};

// Departments draw categorical values from department-specific skewed
// marginals over a shared alphabet, organised around a few posting
// prototypes (so attributes co-vary), and amounts from department-specific
// ranges. Throws ConfigError on zero counts.
SynthResult synthesize_dataset(const SynthSpec& spec);

}  // namespace fedledger::data
