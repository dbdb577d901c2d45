#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "fedledger/data/table.hpp"

namespace fedledger::data {

// Column mapping for one public city-payments export.
struct DatasetProfile {
  std::string kind;
  std::vector<std::string> categorical_columns;
  std::vector<std::string> numerical_columns;
  std::string department_column;
  std::vector<std::string> default_departments;
};

// Built-in profiles: "philadelphia", "chicago", "york". Throws ConfigError
// for an unknown kind.
DatasetProfile builtin_profile(const std::string& kind);
std::vector<std::string> builtin_profile_names();

// RFC 4180 record splitting (quoted fields, doubled quotes, CRLF). Returns
// false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields);

// Parses a header-first CSV with the given profile. Rows with the wrong
// field count or an unparsable amount are skipped and counted in
// malformed_rows. Missing file -> DataError; empty file or a missing
// required column -> DataError naming the column.
RawTable load_city_csv(const std::filesystem::path& path, const DatasetProfile& profile);
RawTable parse_city_csv(std::istream& in, const DatasetProfile& profile);

// Writes a table back out as CSV with the profile's column names.
void write_csv(const RawTable& table, const std::filesystem::path& path);

}  // namespace fedledger::data
