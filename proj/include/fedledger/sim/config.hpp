#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedledger/data/synth.hpp"
#include "fedledger/fl/strategies.hpp"
#include "fedledger/nn/adam.hpp"
#include "fedledger/nn/loss.hpp"
#include "fedledger/nn/trainer.hpp"

namespace fedledger::sim {

struct DatasetConfig {
  std::string kind = "synthetic";        // synthetic | philadelphia | chicago | york
  std::string path;                      // CSV file for the city kinds
  std::string cache_dir;                 // encoded-dataset cache, optional
  std::vector<std::string> departments;  // empty: profile default (or all, for synthetic)
  data::SynthSpec synth;
};

struct RunConfig {
  DatasetConfig dataset;

  int scenario = 1;
  double sparsity_p = 0.5;
  // Explicit activity matrix [client][experience][department], optional.
  std::optional<std::vector<std::vector<std::vector<bool>>>> schedule;

  std::vector<std::string> architectures = {"shallow", "deep"};
  std::vector<std::string> fl = {"fedavg"};
  std::vector<std::string> cl = {"sequential"};

  std::size_t T = 20;
  std::size_t R = 5;
  std::size_t eta = 1000;
  std::size_t rho = 1000;
  std::size_t gamma = 16;
  std::size_t L = 5;
  std::size_t M = 4;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t scale = 1;

  double theta_mix = nn::kDefaultThetaMix;
  nn::AdamConfig adam;
  std::optional<nn::EarlyStopping> early_stopping;

  double ewc_lambda = 500.0;
  std::size_t fisher_samples = 1000;
  double lwf_alpha = 1.2;
  std::size_t buffer_capacity = 1000;
  bool replay_exclude_anomalies = false;

  double prox_mu = 1.2;
  fl::YogiConfig yogi;
  fl::ScaffoldConfig scaffold;

  double anomaly_fraction = 0.02;  // per class and activity, when no count is given
  std::optional<std::size_t> k_global;
  std::optional<std::size_t> k_local;
  std::size_t f_min = 10;
  std::size_t max_resample = 100;
  std::size_t pool_tokens = 10;

  bool cumulative_eval = false;
  bool ap_other_as_negative = false;

  std::string out_dir = "runs";
  std::size_t threads = 0;  // 0: hardware concurrency, capped by FEDLEDGER_THREADS
};

// Throws ConfigError with a JSON pointer for the first violated invariant.
void validate(const RunConfig& config);

// T, R, eta and rho divided by the scale factor, rounded up.
RunConfig apply_scale(const RunConfig& config);

std::size_t worker_count(const RunConfig& config);

}  // namespace fedledger::sim
