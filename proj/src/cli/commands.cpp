#include "fedledger/cli/commands.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <ostream>

#include "fedledger/cli/config_io.hpp"
#include "fedledger/data/csv.hpp"
#include "fedledger/data/synth.hpp"
#include "fedledger/errors.hpp"
#include "fedledger/eval/report.hpp"
#include "fedledger/sim/simulation.hpp"

namespace fedledger::cli {

namespace {

namespace fs = std::filesystem;

sim::RunConfig load(const Invocation& inv) {
  std::vector<std::string> overrides = inv.overrides;
  if (inv.scale) overrides.push_back("scale=" + std::to_string(*inv.scale));
  if (inv.seeds) {
    nlohmann::json s = *inv.seeds;
    overrides.push_back("seeds=" + s.dump());
  }
  if (!inv.out.empty() && (inv.subcommand == "run" || inv.subcommand == "validate-config"))
    overrides.push_back("out_dir=" + nlohmann::json(inv.out).dump());
  return parse_config(inv.config_path, overrides);
}

int cmd_validate(const Invocation& inv, std::ostream& out) {
  const auto c = load(inv);
  out << config_to_json(c).dump(2) << "\n";
  return 0;
}

int cmd_run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const auto given = load(inv);
  const auto id = run_id(given);
  const fs::path dir = fs::path(given.out_dir) / id;
  const auto c = sim::apply_scale(given);

  const auto started = std::chrono::steady_clock::now();
  const auto prepared = sim::prepare_data(c);
  if (!inv.quiet)
    err << "run " << id << ": " << prepared.dataset.rows.rows << " entries, " << c.L << " departments, width "
        << prepared.dataset.schema.width() << "\n";

  const auto result = sim::run_simulation(c, prepared, [&](const eval::MetricsRecord& r) {
    if (inv.quiet) return;
    err << "seed " << r.seed << " " << r.arch << " " << r.fl << "/" << r.cl << " t=" << r.t << "  AP_global ";
    if (r.ap_global) err << std::fixed << std::setprecision(4) << *r.ap_global; else err << "-";
    err << "  AP_local ";
    if (r.ap_local) err << std::fixed << std::setprecision(4) << *r.ap_local; else err << "-";
    err << std::defaultfloat << "\n";
  });

  fs::create_directories(dir);
  eval::write_text(dir / "config.json", config_to_json(given).dump(2) + "\n");
  std::string transcript;
  for (const auto& line : result.transcript) transcript += line + "\n";
  eval::write_text(dir / "transcript.jsonl", transcript);
  eval::emit_reports(eval::summarize(result.records, c.dataset.kind), result.records, dir);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (!inv.quiet) err << "finished in " << std::fixed << std::setprecision(1) << secs << " s\n";
  out << dir.string() << "\n";
  return 0;
}

int cmd_synth(const Invocation& inv, std::ostream& out) {
  const auto c = load(inv);
  if (inv.out.empty()) throw ConfigError("synth-data needs --out FILE");
  const auto synth = data::synthesize_dataset(c.dataset.synth);
  const fs::path path = inv.out;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  data::write_csv(synth.table, path);
  out << path.string() << "\n";
  return 0;
}

int cmd_encode(const Invocation& inv, std::ostream& out) {
  auto c = load(inv);
  if (!inv.out.empty()) c.dataset.cache_dir = inv.out;
  if (c.dataset.cache_dir.empty()) throw ConfigError("encode needs --out DIR or dataset.cache_dir", "/dataset/cache_dir");
  const auto prepared = sim::prepare_data(c);
  out << c.dataset.cache_dir << ": " << prepared.dataset.rows.rows << " entries, width "
      << prepared.dataset.schema.width() << "\n";
  return 0;
}

int cmd_replot(const Invocation& inv, std::ostream& out) {
  if (inv.out.empty()) throw ConfigError("replot needs --out RUN_DIR");
  const fs::path dir = inv.out;
  const auto records = eval::parse_metrics_csv(eval::read_text(dir / "metrics.csv"));
  eval::write_plots(records, dir);
  out << dir.string() << "\n";
  return 0;
}

}  // namespace

int run_command(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    if (inv.subcommand == "run") return cmd_run(inv, out, err);
    if (inv.subcommand == "validate-config") return cmd_validate(inv, out);
    if (inv.subcommand == "synth-data") return cmd_synth(inv, out);
    if (inv.subcommand == "encode") return cmd_encode(inv, out);
    if (inv.subcommand == "replot") return cmd_replot(inv, out);
    err << "error: unknown subcommand '" << inv.subcommand << "'\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace fedledger::cli
