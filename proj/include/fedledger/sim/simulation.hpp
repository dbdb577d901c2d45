#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fedledger/anomaly/pool.hpp"
#include "fedledger/data/dataset.hpp"
#include "fedledger/data/streams.hpp"
#include "fedledger/eval/metrics.hpp"
#include "fedledger/nn/param_vector.hpp"
#include "fedledger/sim/config.hpp"

namespace fedledger::sim {

struct PreparedData {
  data::EncodedDataset dataset;  // restricted to the first L departments
  anomaly::AnomalyPool pool;
};

// Loads (or synthesizes) and encodes the configured dataset, reading or
// writing the cache when one is configured.
PreparedData prepare_data(const RunConfig& config);

// Rows of one client for experience t (0-based). The audit client (index 0)
// gets its anomalies here, seeded per (seed, t, department), so every
// strategy of a seed sees the same data.
data::EncodedBatch client_experience_batch(const RunConfig& config, const PreparedData& data,
                                           const data::ExperienceStream& stream, std::size_t t, std::uint64_t seed);

struct FinalModel {
  std::uint64_t seed = 0;
  std::string arch, fl, cl;
  nn::ParamVector params;
};

struct RunResult {
  std::vector<eval::MetricsRecord> records;
  std::vector<std::string> transcript;  // JSON lines
  std::vector<FinalModel> final_models;
};

// Scores the audit batch with the central model. ap_* stay empty when the
// batch has no anomaly of that class.
eval::MetricsRecord evaluate_experience(const nn::ParamVector& params, const nn::ArchitectureSpec& spec,
                                        const nn::SegmentLayout& layout, const data::EncodedBatch& audit,
                                        const std::vector<std::string>& department_names, double theta_mix,
                                        bool other_as_negative = false);

// The full protocol for every seed, architecture and (fl, cl) pair. The
// config is used as given; apply_scale first for scaled runs.
RunResult run_simulation(const RunConfig& config, const PreparedData& data);

// Progress callback, called once per finished experience.
using ProgressFn = std::function<void(const eval::MetricsRecord&)>;
RunResult run_simulation(const RunConfig& config, const PreparedData& data, const ProgressFn& progress);

}  // namespace fedledger::sim
