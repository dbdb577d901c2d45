#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fedledger/anomaly/pool.hpp"
#include "fedledger/data/table.hpp"
#include "fedledger/nn/layout.hpp"
#include "fedledger/nn/matrix.hpp"

namespace fedledger::data {

struct CategoricalDictionary {
  std::string name;
  std::vector<std::string> values;  // index -> value
  std::unordered_map<std::string, std::size_t> index;

  std::size_t cardinality() const { return values.size(); }
  std::optional<std::size_t> find(const std::string& value) const;
  void add(const std::string& value);
};

struct NumericRange {
  std::string name;
  double min = 0.0;
  double max = 0.0;
};

// Attribute dictionaries and numeric ranges; defines the encoded row layout
// (one-hot segments first, in attribute order, then the numeric slots).
class DatasetSchema {
 public:
  std::vector<CategoricalDictionary> categorical;
  std::vector<NumericRange> numerical;
  std::string department_attribute;

  std::size_t width() const;
  nn::SegmentLayout layout() const;

  friend bool operator==(const DatasetSchema& a, const DatasetSchema& b);
};

// Dictionaries cover the regular entries plus the anomaly pool; numeric
// ranges come from the regular entries only.
DatasetSchema build_schema(const RawTable& table, const anomaly::AnomalyPool* pool = nullptr);

// One-hot categorical segments, min-max scaled numerics clamped to [0, 1].
// A constant numeric column (min == max) encodes as 0.0.
std::vector<double> encode_entry(const DatasetSchema& schema, const Entry& entry);

// Inverse of encode_entry for in-range rows: argmax per segment and
// unscaled numerics. The department is not part of the encoding.
Entry decode_row(const DatasetSchema& schema, std::span<const double> row);

// Index of the hot value of categorical attribute `attr` (argmax, ties to
// the lowest index).
std::size_t hot_index(const nn::SegmentLayout& layout, std::span<const double> row, std::size_t attr);

}  // namespace fedledger::data
