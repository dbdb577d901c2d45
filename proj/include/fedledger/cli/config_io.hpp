#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fedledger/sim/config.hpp"
#include "json.hpp"

namespace fedledger::cli {

// JSON document -> validated RunConfig. Missing keys take their defaults;
// unknown keys, type mismatches and invariant violations raise ConfigError
// with a JSON pointer.
sim::RunConfig config_from_json(const nlohmann::json& doc);

// Every field, defaults included. Absent optionals are null.
nlohmann::json config_to_json(const sim::RunConfig& config);

// Sorted keys, no whitespace.
std::string canonical_config(const sim::RunConfig& config);

// 16 hex digits, FNV-1a over the canonical config and the code version.
std::string run_id(const sim::RunConfig& config);

// "a.b.c=VALUE" applied to the document. VALUE is parsed as JSON and kept
// as a plain string when that fails.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Reads the file (or starts from {} when path is empty), then applies the
// overrides in order.
sim::RunConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides);

}  // namespace fedledger::cli
