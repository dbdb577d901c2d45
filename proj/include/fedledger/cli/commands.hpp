#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fedledger::cli {

struct Invocation {
  std::string subcommand;  // run | synth-data | encode | validate-config | replot
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;  // run/validate-config: out_dir; synth-data: CSV file; encode: cache dir; replot: run dir
  std::optional<std::size_t> scale;
  std::optional<std::vector<std::uint64_t>> seeds;
  bool quiet = false;
};

// Exit codes: 0 ok, 1 configuration, 2 data, 3 runtime or numeric.
int run_command(const Invocation& inv, std::ostream& out, std::ostream& err);

}  // namespace fedledger::cli
