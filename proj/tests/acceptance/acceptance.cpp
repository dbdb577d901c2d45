// Acceptance checks, one line per criterion. Usage: acceptance [N ...]
// (no arguments runs all ten). Exit status is non-zero if any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fedledger/anomaly/injector.hpp"
#include "fedledger/cli/commands.hpp"
#include "fedledger/cli/config_io.hpp"
#include "fedledger/data/schedule.hpp"
#include "fedledger/eval/metrics.hpp"
#include "fedledger/eval/report.hpp"
#include "fedledger/fl/strategies.hpp"
#include "fedledger/nn/autoencoder.hpp"
#include "fedledger/nn/loss.hpp"
#include "fedledger/rng.hpp"
#include "fedledger/sim/simulation.hpp"
#include "helpers.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace fedledger;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kGradRelTol = 1e-4;
constexpr double kGradStep = 1e-4;
constexpr double kInvarianceTol = 1e-12;
constexpr double kLossFixture = 0.16210;
constexpr double kLossTol = 1e-5;
constexpr double kControlVariateTol = 1e-12;
constexpr double kScaffoldFixtureTol = 1e-12;
constexpr double kBudgetApSeconds = 10.0;
constexpr double kBudgetGradSeconds = 30.0;
constexpr double kBudgetTrendSeconds = 15.0 * 60.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / "fedledger_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

// ---------------------------------------------------------------- 1

Outcome ap_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240601);
  std::size_t pools = 0, mismatches = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      std::vector<bool> pos(n);
      for (std::size_t i = 0; i < n; ++i) pos[i] = (mask >> i) & 1u;
      // distinct scores, heavily tied scores, and a single flat score
      std::vector<std::vector<double>> score_sets(3, std::vector<double>(n));
      for (std::size_t i = 0; i < n; ++i) {
        score_sets[0][i] = uniform01(rng);
        score_sets[1][i] = static_cast<double>(uniform_index(rng, 3));
        score_sets[2][i] = 0.25;
      }
      for (const auto& s : score_sets) {
        ++pools;
        const auto ap = eval::average_precision(s, pos);
        if (!ap || *ap != oracles::brute_force_ap(s, pos)) ++mismatches;
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = mismatches == 0 && secs < kBudgetApSeconds;
  o.detail = std::to_string(pools) + " pools, " + std::to_string(mismatches) + " mismatches, " + fmt("%.2f s", secs);
  return o;
}

// ---------------------------------------------------------------- 2

Outcome gradient_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto layout = testing_helpers::small_layout();
  Rng rng(77);
  const std::vector<std::vector<std::size_t>> hiddens{{4, 2}, {6, 3}, {5, 3, 2}, {3, 2}, {7, 2}};
  double worst = 0.0;
  std::size_t largest = 0;
  for (int model = 0; model < 20; ++model) {
    const auto spec = nn::ArchitectureSpec::symmetric(layout.width, hiddens[model % hiddens.size()]);
    auto params = nn::init_model(spec, 500 + model);
    for (std::size_t l = 0; l < params.shapes.size(); ++l)
      for (double& b : params.bias(l)) b = uniform(rng, -0.3, 0.3);
    largest = std::max(largest, params.size());
    const auto batch = testing_helpers::random_rows(layout, 4, rng);
    const double theta = uniform(rng, 0.2, 0.9);
    const auto analytic = nn::backward(params, spec, batch, layout, theta).gradient;
    auto loss_at = [&](const std::vector<double>& v) {
      nn::ParamVector p = params;
      p.values = v;
      const auto losses = nn::row_losses(p, spec, batch, layout, theta);
      double s = 0.0;
      for (const auto& lb : losses) s += lb.total;
      return s / static_cast<double>(losses.size());
    };
    const auto numeric = oracles::central_differences(loss_at, params.values, kGradStep);
    for (std::size_t i = 0; i < numeric.size(); ++i)
      worst = std::max(worst, oracles::relative_error(analytic.values[i], numeric[i]));
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst < kGradRelTol && largest <= 200 && secs < kBudgetGradSeconds;
  o.detail = "20 models (<= " + std::to_string(largest) + " params), worst relative error " + fmt("%.3g", worst) +
             ", " + fmt("%.2f s", secs);
  return o;
}

// ---------------------------------------------------------------- 3

fl::ClientUpdate scalar_update(std::size_t client, std::vector<double> v, std::size_t n) {
  fl::ClientUpdate u;
  u.client = client;
  u.samples = n;
  u.params = nn::ParamVector({nn::LayerShape{static_cast<std::uint32_t>(v.size()), 0}});
  u.params.values = std::move(v);
  return u;
}

Outcome aggregation_exactness() {
  const std::vector<fl::ClientUpdate> fixture = {scalar_update(0, {1.0}, 100), scalar_update(1, {3.0}, 300)};
  const double got = fl::fedavg_aggregate(fixture).values[0];
  Rng rng(31);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + uniform_index(rng, 6), len = 1 + uniform_index(rng, 40);
    std::vector<fl::ClientUpdate> ups;
    for (std::size_t w = 0; w < m; ++w) {
      std::vector<double> v(len);
      for (double& x : v) x = normal(rng);
      ups.push_back(scalar_update(w, v, 1 + uniform_index(rng, 2000)));
    }
    const auto base = fl::fedavg_aggregate(ups);
    auto perm = ups;
    shuffle(perm, rng);
    auto scaled = ups;
    const std::size_t k = 2 + uniform_index(rng, 50);
    for (auto& u : scaled) u.samples *= k;
    const auto a = fl::fedavg_aggregate(perm), b = fl::fedavg_aggregate(scaled);
    for (std::size_t j = 0; j < len; ++j)
      worst = std::max({worst, std::abs(a.values[j] - base.values[j]), std::abs(b.values[j] - base.values[j])});
  }
  Outcome o;
  o.pass = got == 2.5 && worst <= kInvarianceTol;
  o.detail = "fixture " + fmt("%.17g", got) + ", worst permutation/scaling deviation " + fmt("%.3g", worst) +
             " over 100 fixtures";
  return o;
}

// ---------------------------------------------------------------- 4

sim::RunConfig ladder_config() {
  sim::RunConfig c;
  c.dataset.synth.n_departments = 3;
  c.dataset.synth.rows_per_department = 400;
  c.dataset.synth.seed = 5;
  c.L = 3;
  c.M = 3;
  c.T = 3;
  c.R = 2;
  c.eta = 25;
  c.rho = 80;
  c.seeds = {1, 2};
  c.architectures = {"shallow"};
  c.scenario = 3;
  c.fisher_samples = 40;
  c.threads = 1;
  return c;
}

std::vector<std::string> checksum_trail(const sim::RunResult& r) {
  std::vector<std::string> trail;
  for (const auto& line : r.transcript) {
    const auto j = nlohmann::json::parse(line);
    if (j["event"] == "round") trail.push_back(j["checksum"].get<std::string>());
  }
  for (const auto& f : r.final_models) trail.push_back(nn::checksum(f.params));
  return trail;
}

Outcome degeneracy_ladder() {
  const auto base_cfg = ladder_config();
  const auto prepared = sim::prepare_data(base_cfg);
  const auto baseline = sim::run_simulation(base_cfg, prepared);
  const auto base_trail = checksum_trail(baseline);

  struct Rung {
    const char* name;
    std::function<void(sim::RunConfig&)> set;
  };
  const std::vector<Rung> rungs = {
      {"ewc lambda=0", [](sim::RunConfig& c) { c.cl = {"ewc"}; c.ewc_lambda = 0.0; }},
      {"lwf alpha=0", [](sim::RunConfig& c) { c.cl = {"lwf"}; c.lwf_alpha = 0.0; }},
      {"replay empty buffer", [](sim::RunConfig& c) { c.cl = {"replay"}; c.buffer_capacity = 0; }},
      {"fedprox mu=0", [](sim::RunConfig& c) { c.fl = {"fedprox"}; c.prox_mu = 0.0; }},
      {"scaffold zeroed variates", [](sim::RunConfig& c) { c.fl = {"scaffold"}; c.scaffold.pin_zero = true; }},
  };
  std::string detail;
  bool pass = !base_trail.empty();
  for (const auto& rung : rungs) {
    auto c = base_cfg;
    rung.set(c);
    const bool same = checksum_trail(sim::run_simulation(c, prepared)) == base_trail;
    pass = pass && same;
    detail += std::string(detail.empty() ? "" : ", ") + rung.name + (same ? " identical" : " DIFFERS");
  }
  return {pass, detail + " (" + std::to_string(base_trail.size()) + " checksums each)"};
}

// ---------------------------------------------------------------- 5, 6, 8

struct RunOutput {
  fs::path dir;
  std::vector<eval::MetricsRecord> records;
  double seconds = 0.0;
  int exit_code = 0;
};

RunOutput cli_run(const std::vector<std::string>& overrides, const fs::path& out_root) {
  cli::Invocation inv;
  inv.subcommand = "run";
  inv.quiet = true;
  inv.out = out_root.string();
  inv.overrides = overrides;
  std::ostringstream out, err;
  RunOutput r;
  const auto t0 = std::chrono::steady_clock::now();
  r.exit_code = cli::run_command(inv, out, err);
  r.seconds = seconds_since(t0);
  if (r.exit_code != 0) {
    std::fprintf(stderr, "%s", err.str().c_str());
    return r;
  }
  std::string path = out.str();
  while (!path.empty() && (path.back() == '\n' || path.back() == '\r')) path.pop_back();
  r.dir = path;
  r.records = eval::parse_metrics_csv(eval::read_text(r.dir / "metrics.csv"));
  return r;
}

// Mean of the per-seed mean AP_global, unrounded.
std::map<std::string, double> mean_ap_global(const std::vector<eval::MetricsRecord>& records, bool by_fl) {
  std::map<std::string, std::map<std::uint64_t, std::pair<double, std::size_t>>> acc;
  for (const auto& r : records) {
    if (!r.ap_global) continue;
    auto& cell = acc[by_fl ? r.fl : r.cl][r.seed];
    cell.first += *r.ap_global;
    ++cell.second;
  }
  std::map<std::string, double> out;
  for (const auto& [name, seeds] : acc) {
    double s = 0.0;
    for (const auto& [seed, cell] : seeds) s += cell.first / static_cast<double>(cell.second);
    out[name] = s / static_cast<double>(seeds.size());
  }
  return out;
}

std::vector<std::string> desk_overrides(int scenario) {
  return {"architecture=shallow", "scenario=" + std::to_string(scenario), "M=4", "T=5", "R=2", "eta=200",
          "rho=200", "seeds=[1,2,3]", "dataset.synthetic.departments=5",
          "dataset.synthetic.rows_per_department=2000", "dataset.synthetic.categorical=4",
          "dataset.synthetic.cardinality=8", "dataset.synthetic.numerical=1"};
}

std::string list_means(const std::map<std::string, double>& m, const std::vector<std::string>& order) {
  std::string s;
  for (const auto& k : order) {
    auto it = m.find(k);
    s += (s.empty() ? "" : ", ") + k + " " + (it == m.end() ? std::string("n/a") : fmt("%.2f", 100.0 * it->second));
  }
  return s;
}

Outcome forgetting_trend() {
  auto ov = desk_overrides(1);
  ov.push_back("cl=[\"scratch\",\"sequential\",\"replay\",\"lwf\",\"ewc\"]");
  const auto run = cli_run(ov, work_dir() / "forgetting");
  if (run.exit_code != 0) return {false, "run failed with exit code " + std::to_string(run.exit_code)};
  const auto m = mean_ap_global(run.records, false);
  const std::vector<std::string> order = {"scratch", "sequential", "replay", "lwf", "ewc"};
  for (const auto& k : order)
    if (!m.count(k)) return {false, "no AP_global for " + k};
  const double seq = m.at("sequential");
  const bool pass = m.at("replay") > seq && m.at("lwf") > seq && m.at("ewc") > seq && seq > m.at("scratch") &&
                    run.seconds < kBudgetTrendSeconds;
  return {pass, "mean AP_global " + list_means(m, order) + ", " + fmt("%.0f s", run.seconds)};
}

RunOutput interference_run_a, interference_run_b;

Outcome interference_trend() {
  auto ov = desk_overrides(2);
  ov.push_back("fl=[\"fedavg\",\"fedprox\",\"scaffold\"]");
  ov.push_back("cl=sequential");
  interference_run_a = cli_run(ov, work_dir() / "interference_a");
  const auto& run = interference_run_a;
  if (run.exit_code != 0) return {false, "run failed with exit code " + std::to_string(run.exit_code)};
  const auto m = mean_ap_global(run.records, true);
  const std::vector<std::string> order = {"fedavg", "fedprox", "scaffold"};
  for (const auto& k : order)
    if (!m.count(k)) return {false, "no AP_global for " + k};
  const bool pass = m.at("fedprox") > m.at("fedavg") && m.at("scaffold") > m.at("fedavg") &&
                    run.seconds < kBudgetTrendSeconds;
  return {pass, "mean AP_global " + list_means(m, order) + ", " + fmt("%.0f s", run.seconds)};
}

Outcome determinism() {
  auto ov = desk_overrides(2);
  ov.push_back("fl=[\"fedavg\",\"fedprox\",\"scaffold\"]");
  ov.push_back("cl=sequential");
  if (interference_run_a.dir.empty()) interference_run_a = cli_run(ov, work_dir() / "interference_a");
  interference_run_b = cli_run(ov, work_dir() / "interference_b");
  const auto& a = interference_run_a;
  const auto& b = interference_run_b;
  if (a.exit_code != 0 || b.exit_code != 0) return {false, "a run failed"};
  const bool same_id = a.dir.filename() == b.dir.filename();
  const auto ma = eval::read_text(a.dir / "metrics.csv"), mb = eval::read_text(b.dir / "metrics.csv");
  const bool same_bytes = ma == mb;
  const bool same_transcript =
      eval::read_text(a.dir / "transcript.jsonl") == eval::read_text(b.dir / "transcript.jsonl");
  return {same_id && same_bytes && same_transcript,
          "run-id " + a.dir.filename().string() + (same_id ? " == " : " != ") + b.dir.filename().string() +
              ", metrics.csv " + std::to_string(ma.size()) + " bytes " + (same_bytes ? "identical" : "DIFFER") +
              ", transcript " + (same_transcript ? "identical" : "DIFFERS")};
}

// ---------------------------------------------------------------- 7

Outcome injection_invariants() {
  sim::RunConfig c;  // default synthetic data: 5 departments x 2000 rows, 4 categorical, 1 numeric
  const auto prepared = sim::prepare_data(c);
  const auto& schema = prepared.dataset.schema;
  const auto layout = schema.layout();
  const auto by_dept = prepared.dataset.entries_by_department();
  const std::size_t J = layout.categorical.size();
  const std::size_t f_min = 10, rho = 1000, k = 20;

  auto hot = [&](std::span<const double> row) {
    std::vector<std::size_t> v(J);
    for (std::size_t j = 0; j < J; ++j) {
      const auto& seg = layout.categorical[j];
      v[j] = static_cast<std::size_t>(
          std::max_element(row.begin() + seg.offset, row.begin() + seg.offset + seg.width) - (row.begin() + seg.offset));
    }
    return v;
  };

  Rng rng(4242);
  std::size_t globals = 0, locals = 0, strict_locals = 0, relaxed_rows = 0, bad_global = 0, bad_local = 0;
  for (int activity = 0; activity < 50; ++activity) {
    const auto& pool = by_dept[uniform_index(rng, by_dept.size())];
    const auto picks = sample_without_replacement(rng, pool.size(), rho);
    std::vector<std::size_t> ids;
    for (std::size_t p : picks) ids.push_back(pool[p]);
    auto batch = prepared.dataset.batch(ids);
    const auto original = batch.rows;
    anomaly::inject_global(batch, k, schema, prepared.pool, rng);
    const std::size_t relaxed = anomaly::inject_local(batch, k, schema, rng, {f_min, 100});
    relaxed_rows += relaxed;

    // frequencies over the rows still labelled clean
    std::vector<std::map<std::size_t, std::size_t>> freq(J);
    std::vector<std::map<double, std::size_t>> num_freq(layout.numerical.size());
    std::set<std::vector<std::size_t>> combos;
    std::vector<std::vector<std::size_t>> clean_vals;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch.labels[i] != data::AnomalyLabel::none) continue;
      const auto row = batch.rows.row(i);
      const auto v = hot(row);
      clean_vals.push_back(v);
      combos.insert(v);
      for (std::size_t j = 0; j < J; ++j) ++freq[j][v[j]];
      for (std::size_t n = 0; n < layout.numerical.size(); ++n) ++num_freq[n][row[layout.numerical[n]]];
    }
    auto count = [](const auto& m, const auto& key) {
      auto it = m.find(key);
      return it == m.end() ? std::size_t{0} : it->second;
    };

    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto row = batch.rows.row(i);
      const auto v = hot(row);
      if (batch.labels[i] == data::AnomalyLabel::global) {
        ++globals;
        bool unseen = false;
        for (std::size_t j = 0; j < J; ++j) unseen = unseen || count(freq[j], v[j]) == 0;
        for (std::size_t n = 0; n < layout.numerical.size(); ++n)
          unseen = unseen || count(num_freq[n], row[layout.numerical[n]]) == 0;
        if (!unseen) ++bad_global;
      } else if (batch.labels[i] == data::AnomalyLabel::local) {
        ++locals;
        if (relaxed > 0) continue;  // only pre-relaxation activities are gated
        ++strict_locals;
        const auto before = hot(original.row(i));
        std::vector<std::size_t> changed;
        for (std::size_t j = 0; j < J; ++j)
          if (before[j] != v[j]) changed.push_back(j);
        bool ok = !changed.empty() && changed.size() <= 2 && combos.count(v) == 0;
        for (std::size_t j : changed) ok = ok && count(freq[j], v[j]) >= f_min;
        // a pair holding the changed values, both common, that never co-occurs
        bool novel_pair = false;
        for (std::size_t a = 0; a < J; ++a)
          for (std::size_t b = a + 1; b < J; ++b) {
            if (std::find(changed.begin(), changed.end(), a) == changed.end() &&
                std::find(changed.begin(), changed.end(), b) == changed.end())
              continue;
            if (changed.size() == 2 && !(a == changed[0] && b == changed[1])) continue;
            if (count(freq[a], v[a]) < f_min || count(freq[b], v[b]) < f_min) continue;
            const bool seen = std::any_of(clean_vals.begin(), clean_vals.end(),
                                          [&](const auto& cv) { return cv[a] == v[a] && cv[b] == v[b]; });
            novel_pair = novel_pair || !seen;
          }
        if (!(ok && novel_pair)) ++bad_local;
      }
    }
  }
  const bool counts_ok = globals == 50 * k && locals == 50 * k;
  return {counts_ok && bad_global == 0 && bad_local == 0 && strict_locals > 0,
          std::to_string(globals) + " global (" + std::to_string(bad_global) + " violations), " +
              std::to_string(locals) + " local, " + std::to_string(strict_locals) + " checked pre-relaxation (" +
              std::to_string(bad_local) + " violations), " + std::to_string(relaxed_rows) + " relaxed rows"};
}

// ---------------------------------------------------------------- 9

Outcome loss_fixture() {
  nn::SegmentLayout layout;
  layout.categorical = {{0, 2}};
  layout.numerical = {2};
  layout.width = 3;
  const std::vector<double> target{1.0, 0.0, 0.5};
  // decoder outputs live in (-1, 1); categorical slots map to (y + 1) / 2
  const std::vector<double> output{2 * 0.8 - 1, 2 * 0.2 - 1, 0.3};
  const auto lb = nn::reconstruction_loss(layout, target, output, 2.0 / 3.0);
  return {std::abs(lb.total - kLossFixture) <= kLossTol,
          "total " + fmt("%.8f", lb.total) + " (bce " + fmt("%.6f", lb.bce_part) + ", mse " + fmt("%.6f", lb.mse_part) +
              ")"};
}

// ---------------------------------------------------------------- 10

Outcome scaffold_fixture() {
  const std::vector<double> x{1.0}, y{0.9}, zero{0.0};
  const double c_plus = fl::scaffold_option2(x, y, zero, zero, 1, 0.1)[0];

  Rng rng(10);
  const std::size_t m = 4, n = 9;
  fl::ScaffoldState st;
  st.init(n, m);
  auto server = nn::ParamVector({nn::LayerShape{static_cast<std::uint32_t>(n), 0}});
  double worst = 0.0;
  for (int round = 0; round < 30; ++round) {
    std::vector<fl::ClientUpdate> ups;
    for (std::size_t w = 0; w < m; ++w) {
      auto local = server;
      for (double& v : local.values) v += 0.02 * normal(rng);
      fl::ClientUpdate u;
      u.client = w;
      u.samples = 50 + uniform_index(rng, 500);
      u.control_delta = fl::scaffold_finish_local(st, w, server, local, 1 + uniform_index(rng, 200), 1e-3);
      u.params = std::move(local);
      ups.push_back(std::move(u));
    }
    server = fl::scaffold_server_update(st, server, ups);
    for (std::size_t j = 0; j < n; ++j) {
      double mean = 0.0;
      for (const auto& cw : st.c_client) mean += cw[j];
      worst = std::max(worst, std::abs(st.c[j] - mean / static_cast<double>(m)));
    }
  }
  return {std::abs(c_plus - 1.0) <= kScaffoldFixtureTol && worst <= kControlVariateTol,
          "c+ = " + fmt("%.17g", c_plus) + ", worst |c - mean(c_w)| over 30 rounds " + fmt("%.3g", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"AP matches brute-force enumeration", ap_oracle},
      {"backprop matches central differences", gradient_oracle},
      {"FedAvg fixture and invariances", aggregation_exactness},
      {"strategy degeneracy ladder", degeneracy_ladder},
      {"forgetting trend (Scenario 1)", forgetting_trend},
      {"interference trend (Scenario 2)", interference_trend},
      {"anomaly injection invariants", injection_invariants},
      {"deterministic desk-scale runs", determinism},
      {"reconstruction loss fixture", loss_fixture},
      {"Scaffold Option II fixture", scaffold_fixture},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d: %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  fs::remove_all(work_dir());
  return failed == 0 ? 0 : 1;
}
