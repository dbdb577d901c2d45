#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fedledger/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"federated continual-learning simulator for ledger anomaly detection"};
  app.require_subcommand(1);

  fedledger::cli::Invocation inv;
  std::string seeds;
  std::size_t scale = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"run", "run the configured experiment grid"},
      {"synth-data", "write the synthetic dataset as CSV to --out"},
      {"encode", "encode the dataset into the cache directory"},
      {"validate-config", "check a config and print it in canonical form"},
      {"replot", "regenerate the SVG plots of a run directory"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config_path, "JSON config file");
    sub->add_option("--set", inv.overrides, "override KEY=VALUE (dotted keys, repeatable)");
    sub->add_option("--out", inv.out, "output location");
    sub->add_option("--scale", scale, "divide T, R, eta and rho by N")->check(CLI::PositiveNumber);
    sub->add_option("--seeds", seeds, "comma-separated seeds");
    sub->add_flag("-q,--quiet", inv.quiet, "no progress output");
    sub->callback([&inv, name = std::string(name)] { inv.subcommand = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (scale) inv.scale = scale;
  if (!seeds.empty()) {
    std::vector<std::uint64_t> list;
    std::stringstream ss(seeds);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        list.push_back(std::stoull(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        std::cerr << "config error: --seeds expects comma-separated integers, got '" << seeds << "'\n";
        return 1;
      }
    }
    inv.seeds = list;
  }
  return fedledger::cli::run_command(inv, std::cout, std::cerr);
}
