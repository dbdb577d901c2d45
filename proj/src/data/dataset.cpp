#include "fedledger/data/dataset.hpp"

#include <fstream>

#include "fedledger/errors.hpp"
#include "fedledger/nn/param_vector.hpp"
#include "json.hpp"

namespace fedledger::data {

const char* to_string(AnomalyLabel label) {
  switch (label) {
    case AnomalyLabel::global: return "global";
    case AnomalyLabel::local: return "local";
    default: return "none";
  }
}

void EncodedBatch::append(const EncodedBatch& other) {
  rows = nn::vstack(rows, other.rows);
  department.insert(department.end(), other.department.begin(), other.department.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  entry_ids.insert(entry_ids.end(), other.entry_ids.begin(), other.entry_ids.end());
}

EncodedBatch EncodedBatch::select(std::span<const std::size_t> indices) const {
  EncodedBatch out;
  out.rows = nn::gather_rows(rows, indices);
  for (std::size_t i : indices) {
    out.department.push_back(department[i]);
    out.labels.push_back(labels[i]);
    out.entry_ids.push_back(entry_ids[i]);
  }
  return out;
}

std::vector<std::vector<std::size_t>> EncodedDataset::entries_by_department() const {
  std::vector<std::vector<std::size_t>> groups(department_names.size());
  for (std::size_t i = 0; i < department.size(); ++i) groups[department[i]].push_back(i);
  return groups;
}

EncodedBatch EncodedDataset::batch(std::span<const std::size_t> entry_ids) const {
  EncodedBatch out;
  out.rows = nn::gather_rows(rows, entry_ids);
  out.entry_ids.assign(entry_ids.begin(), entry_ids.end());
  out.labels.assign(entry_ids.size(), AnomalyLabel::none);
  for (std::size_t id : entry_ids) out.department.push_back(department[id]);
  return out;
}

EncodedDataset encode_table(const RawTable& table, const std::vector<std::string>& departments,
                            const anomaly::AnomalyPool& pool) {
  const RawTable selected = table.filter_departments(departments);
  std::unordered_map<std::string, std::size_t> dept_index;
  for (std::size_t d = 0; d < departments.size(); ++d) dept_index.emplace(departments[d], d);
  std::vector<std::size_t> counts(departments.size(), 0);
  for (const auto& e : selected.entries) ++counts[dept_index.at(e.department)];
  for (std::size_t d = 0; d < departments.size(); ++d)
    if (counts[d] == 0) throw DataError("department '" + departments[d] + "' has no entries");

  EncodedDataset ds;
  ds.schema = build_schema(selected, &pool);
  ds.department_names = departments;
  ds.rows = nn::Matrix(selected.entries.size(), ds.schema.width());
  ds.department.reserve(selected.entries.size());
  for (std::size_t i = 0; i < selected.entries.size(); ++i) {
    const auto row = encode_entry(ds.schema, selected.entries[i]);
    std::copy(row.begin(), row.end(), ds.rows.row(i).begin());
    ds.department.push_back(dept_index.at(selected.entries[i].department));
  }
  return ds;
}

namespace {

nlohmann::ordered_json schema_to_json(const EncodedDataset& ds) {
  nlohmann::ordered_json j;
  j["department_attribute"] = ds.schema.department_attribute;
  j["departments"] = ds.department_names;
  auto& cat = j["categorical"] = nlohmann::ordered_json::array();
  for (const auto& d : ds.schema.categorical) cat.push_back({{"name", d.name}, {"values", d.values}});
  auto& num = j["numerical"] = nlohmann::ordered_json::array();
  for (const auto& r : ds.schema.numerical) num.push_back({{"name", r.name}, {"min", r.min}, {"max", r.max}});
  return j;
}

}  // namespace

void save_encoded(const EncodedDataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "schema.json", std::ios::trunc);
    if (!out) throw DataError("cannot write " + (dir / "schema.json").string());
    out << schema_to_json(dataset).dump(2) << '\n';
  }
  nn::Container c;
  std::copy_n("FLDS", 4, c.magic);
  c.blocks.push_back({static_cast<std::uint32_t>(dataset.rows.rows), static_cast<std::uint32_t>(dataset.rows.cols)});
  c.blocks.push_back({static_cast<std::uint32_t>(dataset.department.size()), 1});
  c.values = dataset.rows.data;
  for (std::size_t d : dataset.department) c.values.push_back(static_cast<double>(d));
  nn::write_file_bytes(dir / "dataset.flds", nn::encode_container(c));
}

EncodedDataset load_encoded(const std::filesystem::path& dir) {
  EncodedDataset ds;
  std::ifstream in(dir / "schema.json");
  if (!in) throw DataError("cannot open " + (dir / "schema.json").string());
  try {
    const auto j = nlohmann::json::parse(in);
    ds.schema.department_attribute = j.at("department_attribute").get<std::string>();
    ds.department_names = j.at("departments").get<std::vector<std::string>>();
    for (const auto& c : j.at("categorical")) {
      CategoricalDictionary d;
      d.name = c.at("name").get<std::string>();
      for (const auto& v : c.at("values")) d.add(v.get<std::string>());
      ds.schema.categorical.push_back(std::move(d));
    }
    for (const auto& n : j.at("numerical"))
      ds.schema.numerical.push_back({n.at("name").get<std::string>(), n.at("min").get<double>(), n.at("max").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed schema.json: " + std::string(e.what()));
  }
  const auto c = nn::decode_container(nn::read_file_bytes(dir / "dataset.flds"), "FLDS");
  if (c.blocks.size() != 2 || c.blocks[0].cols != ds.schema.width() || c.blocks[1].rows != c.blocks[0].rows ||
      c.values.size() != std::size_t{c.blocks[0].rows} * c.blocks[0].cols + c.blocks[1].rows)
    throw DataError("dataset.flds does not match schema.json");
  const std::size_t n = c.blocks[0].rows;
  ds.rows = nn::Matrix(n, c.blocks[0].cols);
  std::copy_n(c.values.begin(), ds.rows.data.size(), ds.rows.data.begin());
  for (std::size_t i = 0; i < n; ++i) ds.department.push_back(static_cast<std::size_t>(c.values[ds.rows.data.size() + i]));
  return ds;
}

}  // namespace fedledger::data
