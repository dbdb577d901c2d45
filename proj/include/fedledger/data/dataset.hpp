#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fedledger/data/schema.hpp"
#include "fedledger/nn/matrix.hpp"

namespace fedledger::data {

enum class AnomalyLabel : std::uint8_t { none = 0, global = 1, local = 2 };

const char* to_string(AnomalyLabel label);

// Dense encoded rows with per-row metadata. Labels live here and never in
// the feature columns.
struct EncodedBatch {
  nn::Matrix rows;
  std::vector<std::size_t> department;  // index into the dataset's department list
  std::vector<AnomalyLabel> labels;
  std::vector<std::size_t> entry_ids;

  std::size_t size() const { return rows.rows; }
  void append(const EncodedBatch& other);
  EncodedBatch select(std::span<const std::size_t> indices) const;
};

// Every entry of the selected departments, encoded once.
struct EncodedDataset {
  DatasetSchema schema;
  std::vector<std::string> department_names;
  nn::Matrix rows;
  std::vector<std::size_t> department;

  // Entry ids grouped by department index.
  std::vector<std::vector<std::size_t>> entries_by_department() const;
  EncodedBatch batch(std::span<const std::size_t> entry_ids) const;
};

// `departments` fixes the department order; entries of other departments
// are dropped. Throws DataError if a listed department has no entries.
EncodedDataset encode_table(const RawTable& table, const std::vector<std::string>& departments,
                            const anomaly::AnomalyPool& pool);

// Cache layout: <dir>/schema.json and <dir>/dataset.flds (the f64 container
// with magic "FLDS": block 0 = encoded rows, block 1 = department indices).
void save_encoded(const EncodedDataset& dataset, const std::filesystem::path& dir);
EncodedDataset load_encoded(const std::filesystem::path& dir);

}  // namespace fedledger::data
