#include "fedledger/data/schema.hpp"

#include <algorithm>
#include <cmath>

#include "fedledger/errors.hpp"

namespace fedledger::data {

std::optional<std::size_t> CategoricalDictionary::find(const std::string& value) const {
  auto it = index.find(value);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

void CategoricalDictionary::add(const std::string& value) {
  if (index.emplace(value, values.size()).second) values.push_back(value);
}

std::size_t DatasetSchema::width() const {
  std::size_t w = numerical.size();
  for (const auto& d : categorical) w += d.cardinality();
  return w;
}

nn::SegmentLayout DatasetSchema::layout() const {
  nn::SegmentLayout layout;
  std::size_t offset = 0;
  for (const auto& d : categorical) {
    layout.categorical.push_back({offset, d.cardinality()});
    offset += d.cardinality();
  }
  for (std::size_t k = 0; k < numerical.size(); ++k) layout.numerical.push_back(offset + k);
  layout.width = offset + numerical.size();
  return layout;
}

bool operator==(const DatasetSchema& a, const DatasetSchema& b) {
  if (a.department_attribute != b.department_attribute) return false;
  if (a.categorical.size() != b.categorical.size() || a.numerical.size() != b.numerical.size())
    return false;
  for (std::size_t j = 0; j < a.categorical.size(); ++j)
    if (a.categorical[j].name != b.categorical[j].name || a.categorical[j].values != b.categorical[j].values)
      return false;
  for (std::size_t k = 0; k < a.numerical.size(); ++k)
    if (a.numerical[k].name != b.numerical[k].name || a.numerical[k].min != b.numerical[k].min ||
        a.numerical[k].max != b.numerical[k].max)
      return false;
  return true;
}

DatasetSchema build_schema(const RawTable& table, const anomaly::AnomalyPool* pool) {
  if (table.entries.empty()) throw DataError("build_schema: no entries");
  DatasetSchema schema;
  schema.department_attribute = table.department_attribute;
  schema.categorical.resize(table.categorical_names.size());
  for (std::size_t j = 0; j < schema.categorical.size(); ++j)
    schema.categorical[j].name = table.categorical_names[j];
  schema.numerical.resize(table.numerical_names.size());
  for (std::size_t k = 0; k < schema.numerical.size(); ++k) {
    schema.numerical[k].name = table.numerical_names[k];
    schema.numerical[k].min = INFINITY;
    schema.numerical[k].max = -INFINITY;
  }
  for (const auto& e : table.entries) {
    if (e.categorical.size() != schema.categorical.size() || e.numerical.size() != schema.numerical.size())
      throw DataError("build_schema: entry arity does not match the table header");
    for (std::size_t j = 0; j < e.categorical.size(); ++j) schema.categorical[j].add(e.categorical[j]);
    for (std::size_t k = 0; k < e.numerical.size(); ++k) {
      schema.numerical[k].min = std::min(schema.numerical[k].min, e.numerical[k]);
      schema.numerical[k].max = std::max(schema.numerical[k].max, e.numerical[k]);
    }
  }
  if (pool != nullptr) {
    if (pool->categorical.size() != schema.categorical.size())
      throw DataError("build_schema: anomaly pool does not match categorical attributes");
    for (std::size_t j = 0; j < schema.categorical.size(); ++j)
      for (const auto& v : pool->categorical[j]) schema.categorical[j].add(v);
  }
  return schema;
}

std::vector<double> encode_entry(const DatasetSchema& schema, const Entry& entry) {
  if (entry.categorical.size() != schema.categorical.size() ||
      entry.numerical.size() != schema.numerical.size())
    throw EncodingError("encode_entry: entry arity does not match schema");
  std::vector<double> row(schema.width(), 0.0);
  std::size_t offset = 0;
  for (std::size_t j = 0; j < schema.categorical.size(); ++j) {
    const auto& dict = schema.categorical[j];
    const auto idx = dict.find(entry.categorical[j]);
    if (!idx)
      throw EncodingError("unknown value '" + entry.categorical[j] + "' for attribute '" + dict.name + "'");
    row[offset + *idx] = 1.0;
    offset += dict.cardinality();
  }
  for (std::size_t k = 0; k < schema.numerical.size(); ++k) {
    const auto& r = schema.numerical[k];
    double scaled = 0.0;
    if (r.max > r.min) scaled = std::clamp((entry.numerical[k] - r.min) / (r.max - r.min), 0.0, 1.0);
    row[offset + k] = scaled;
  }
  return row;
}

std::size_t hot_index(const nn::SegmentLayout& layout, std::span<const double> row, std::size_t attr) {
  const auto& seg = layout.categorical.at(attr);
  std::size_t best = 0;
  for (std::size_t v = 1; v < seg.width; ++v)
    if (row[seg.offset + v] > row[seg.offset + best]) best = v;
  return best;
}

Entry decode_row(const DatasetSchema& schema, std::span<const double> row) {
  const auto layout = schema.layout();
  if (row.size() != layout.width) throw ShapeError("decode_row: width mismatch");
  Entry e;
  for (std::size_t j = 0; j < schema.categorical.size(); ++j)
    e.categorical.push_back(schema.categorical[j].values[hot_index(layout, row, j)]);
  for (std::size_t k = 0; k < schema.numerical.size(); ++k) {
    const auto& r = schema.numerical[k];
    const double s = row[layout.numerical[k]];
    e.numerical.push_back(r.max > r.min ? r.min + s * (r.max - r.min) : r.min);
  }
  return e;
}

}  // namespace fedledger::data
