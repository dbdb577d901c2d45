#include "fedledger/data/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "fedledger/errors.hpp"

namespace fedledger::data {

DatasetProfile builtin_profile(const std::string& kind) {
  if (kind == "philadelphia") {
    return {kind,
            {"fm", "dept", "department_title", "char_", "character_title", "sub_obj", "sub_obj_title",
             "vendor_name", "doc_ref_no_prefix", "doc_ref_no_prefix_definition"},
            {"transaction_amount"},
            "department_title",
            {"42 Commerce", "52 Free Library", "10 Managing Director", "11 Police", "14 Health"}};
  }
  if (kind == "chicago") {
    return {kind,
            {"VOUCHER NUMBER", "CHECK DATE", "DEPARTMENT NAME", "CONTRACT NUMBER", "VENDOR NAME", "CASHED"},
            {"AMOUNT"},
            "DEPARTMENT NAME",
            {"DEPT OF FAMILY AND SUPPORT SERVICES", "DEPT OF AVIATION", "CHICAGO DEPARTMENT OF TRANSPORTATION",
             "DEPARTMENT OF HEALTH", "DEPARTMENT OF WATER MANAGEMENT"}};
  }
  if (kind == "york") {
    return {kind,
            {"Body Name", "Directorate", "Service Area", "Service Division", "Expenditure Category",
             "Expense Type", "Supplier Name", "Payment Date", "Procurement Category", "Cost Centre",
             "Payment Type"},
            {"Net Amount", "VAT Amount"},
            "Service Area",
            {"Adult Social Care", "Economy Regeneration and Housing", "Housing and Community Safety",
             "Transport Highways and Environ.", "School Funding and Assets"}};
  }
  throw ConfigError("unknown dataset kind '" + kind + "'", "/dataset/kind");
}

std::vector<std::string> builtin_profile_names() { return {"philadelphia", "chicago", "york"}; }

bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      break;
    } else if (c == '\n') {
      break;
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Accepts "1234.5", "$1,234.50", "-12", "(12.00)".
bool parse_amount(const std::string& raw, double& out) {
  std::string s;
  bool negative = false;
  for (char c : trim(raw)) {
    if (c == '$' || c == ',' || c == ' ') continue;
    if (c == '(' || c == ')') {
      negative = true;
      continue;
    }
    s.push_back(c);
  }
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) return false;
  if (negative) out = -out;
  return std::isfinite(out);
}

}  // namespace

RawTable parse_city_csv(std::istream& in, const DatasetProfile& profile) {
  std::vector<std::string> header;
  if (!read_csv_record(in, header) || (header.size() == 1 && trim(header[0]).empty()))
    throw DataError("CSV is empty: a header row is required");
  if (header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(trim(header[i]), i);
  auto require = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end()) throw DataError("CSV is missing required column '" + name + "'");
    return it->second;
  };

  RawTable table;
  table.categorical_names = profile.categorical_columns;
  table.numerical_names = profile.numerical_columns;
  table.department_attribute = profile.department_column;
  std::vector<std::size_t> cat_idx, num_idx;
  for (const auto& c : profile.categorical_columns) cat_idx.push_back(require(c));
  for (const auto& c : profile.numerical_columns) num_idx.push_back(require(c));
  const std::size_t dept_idx = require(profile.department_column);

  std::vector<std::string> fields;
  while (read_csv_record(in, fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
    if (fields.size() != header.size()) {
      ++table.malformed_rows;
      continue;
    }
    Entry e;
    bool ok = true;
    for (std::size_t i : cat_idx) e.categorical.push_back(trim(fields[i]));
    for (std::size_t i : num_idx) {
      double v;
      if (!parse_amount(fields[i], v)) {
        ok = false;
        break;
      }
      e.numerical.push_back(v);
    }
    e.department = trim(fields[dept_idx]);
    if (!ok || e.department.empty()) {
      ++table.malformed_rows;
      continue;
    }
    table.entries.push_back(std::move(e));
  }
  return table;
}

RawTable load_city_csv(const std::filesystem::path& path, const DatasetProfile& profile) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open CSV " + path.string());
  return parse_city_csv(in, profile);
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(const RawTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  // The department column is written separately unless it is also a feature.
  const bool dept_is_feature =
      std::find(table.categorical_names.begin(), table.categorical_names.end(), table.department_attribute) !=
      table.categorical_names.end();
  bool first = true;
  auto sep = [&]() -> std::ofstream& {
    if (!first) out << ',';
    first = false;
    return out;
  };
  if (!dept_is_feature) sep() << quote(table.department_attribute);
  for (const auto& n : table.categorical_names) sep() << quote(n);
  for (const auto& n : table.numerical_names) sep() << quote(n);
  out << "\r\n";
  char buf[64];
  for (const auto& e : table.entries) {
    first = true;
    if (!dept_is_feature) sep() << quote(e.department);
    for (const auto& v : e.categorical) sep() << quote(v);
    for (double v : e.numerical) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      sep() << std::string(buf, ptr);
    }
    out << "\r\n";
  }
}

}  // namespace fedledger::data
