#include "fedledger/sim/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "fedledger/cl/strategy.hpp"
#include "fedledger/data/csv.hpp"
#include "fedledger/errors.hpp"

namespace fedledger::sim {

namespace {

void positive(std::size_t v, const char* pointer) {
  if (v == 0) throw ConfigError("must be positive", pointer);
}

void non_negative(double v, const char* pointer) {
  if (!(v >= 0.0)) throw ConfigError("must be non-negative", pointer);
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

void validate(const RunConfig& c) {
  const auto& ds = c.dataset;
  if (ds.kind == "synthetic") {
    positive(ds.synth.n_departments, "/dataset/synthetic/departments");
    positive(ds.synth.rows_per_department, "/dataset/synthetic/rows_per_department");
    positive(ds.synth.cardinality, "/dataset/synthetic/cardinality");
    positive(ds.synth.prototypes, "/dataset/synthetic/prototypes");
    if (ds.synth.n_categorical + ds.synth.n_numerical == 0)
      throw ConfigError("needs at least one attribute", "/dataset/synthetic/categorical");
    if (!(ds.synth.prototype_fidelity >= 0.0 && ds.synth.prototype_fidelity <= 1.0))
      throw ConfigError("must lie in [0, 1]", "/dataset/synthetic/fidelity");
  } else {
    data::builtin_profile(ds.kind);  // rejects unknown kinds
    if (ds.path.empty() && ds.cache_dir.empty()) throw ConfigError("a CSV path is required for city datasets", "/dataset/path");
  }

  if (c.scenario < 1 || c.scenario > 3) throw ConfigError("must be 1, 2 or 3", "/scenario");
  if (!(c.sparsity_p > 0.0 && c.sparsity_p <= 1.0)) throw ConfigError("must lie in (0, 1]", "/sparsity_p");

  if (c.architectures.empty()) throw ConfigError("at least one architecture is required", "/architecture");
  for (std::size_t i = 0; i < c.architectures.size(); ++i)
    if (c.architectures[i] != "shallow" && c.architectures[i] != "deep")
      throw ConfigError("must be \"shallow\" or \"deep\"", "/architecture/" + std::to_string(i));
  if (c.fl.empty()) throw ConfigError("at least one strategy is required", "/fl");
  for (std::size_t i = 0; i < c.fl.size(); ++i) {
    try {
      fl::parse_strategy(c.fl[i]);
    } catch (const ConfigError&) {
      throw ConfigError("unknown federated strategy '" + c.fl[i] + "'", "/fl/" + std::to_string(i));
    }
  }
  if (c.cl.empty()) throw ConfigError("at least one strategy is required", "/cl");
  for (std::size_t i = 0; i < c.cl.size(); ++i) {
    try {
      cl::parse_strategy(c.cl[i]);
    } catch (const ConfigError&) {
      throw ConfigError("unknown continual-learning strategy '" + c.cl[i] + "'", "/cl/" + std::to_string(i));
    }
  }

  positive(c.T, "/T");
  positive(c.R, "/R");
  positive(c.eta, "/eta");
  positive(c.rho, "/rho");
  positive(c.gamma, "/gamma");
  positive(c.L, "/L");
  positive(c.M, "/M");
  positive(c.scale, "/scale");
  if (c.seeds.empty()) throw ConfigError("at least one seed is required", "/seeds");

  if (!(c.theta_mix >= 0.0 && c.theta_mix <= 1.0)) throw ConfigError("must lie in [0, 1]", "/theta");
  if (!(c.adam.lr > 0.0)) throw ConfigError("must be positive", "/adam/lr");
  if (!(c.adam.beta1 >= 0.0 && c.adam.beta1 < 1.0)) throw ConfigError("must lie in [0, 1)", "/adam/beta1");
  if (!(c.adam.beta2 >= 0.0 && c.adam.beta2 < 1.0)) throw ConfigError("must lie in [0, 1)", "/adam/beta2");
  if (!(c.adam.epsilon > 0.0)) throw ConfigError("must be positive", "/adam/epsilon");
  if (c.early_stopping) {
    positive(c.early_stopping->patience, "/early_stopping/patience");
    positive(c.early_stopping->interval, "/early_stopping/interval");
    non_negative(c.early_stopping->min_delta, "/early_stopping/min_delta");
  }

  non_negative(c.ewc_lambda, "/ewc/lambda");
  positive(c.fisher_samples, "/ewc/fisher_samples");
  non_negative(c.lwf_alpha, "/lwf/alpha");
  non_negative(c.prox_mu, "/fedprox/mu");
  if (!(c.yogi.beta1 >= 0.0 && c.yogi.beta1 < 1.0)) throw ConfigError("must lie in [0, 1)", "/fedyogi/beta1");
  if (!(c.yogi.beta2 >= 0.0 && c.yogi.beta2 < 1.0)) throw ConfigError("must lie in [0, 1)", "/fedyogi/beta2");
  if (!(c.yogi.tau > 0.0)) throw ConfigError("must be positive", "/fedyogi/tau");
  if (!(c.yogi.server_lr > 0.0)) throw ConfigError("must be positive", "/fedyogi/server_lr");
  if (!(c.scaffold.server_lr > 0.0)) throw ConfigError("must be positive", "/scaffold/server_lr");

  if (!(c.anomaly_fraction >= 0.0 && c.anomaly_fraction <= 0.5)) throw ConfigError("must lie in [0, 0.5]", "/anomalies/fraction");
  positive(c.max_resample, "/anomalies/max_resample");

  if (c.schedule) {
    const auto& m = *c.schedule;
    if (m.size() != c.M) throw ConfigError("needs one row per client (M)", "/schedule");
    for (std::size_t w = 0; w < m.size(); ++w) {
      if (m[w].size() < c.T) throw ConfigError("needs at least T experiences", "/schedule/" + std::to_string(w));
      for (std::size_t t = 0; t < m[w].size(); ++t)
        if (m[w][t].size() != c.L)
          throw ConfigError("needs one entry per department (L)", "/schedule/" + std::to_string(w) + "/" + std::to_string(t));
    }
  }
  if (c.out_dir.empty()) throw ConfigError("must not be empty", "/out_dir");
}

RunConfig apply_scale(const RunConfig& config) {
  RunConfig c = config;
  if (c.scale <= 1) return c;
  c.T = ceil_div(c.T, c.scale);
  c.R = ceil_div(c.R, c.scale);
  c.eta = ceil_div(c.eta, c.scale);
  c.rho = ceil_div(c.rho, c.scale);
  if (c.schedule)
    for (auto& row : *c.schedule) row.resize(std::min(row.size(), c.T));
  return c;
}

std::size_t worker_count(const RunConfig& config) {
  std::size_t n = config.threads;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FEDLEDGER_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, std::min(n, config.M));
}

}  // namespace fedledger::sim
