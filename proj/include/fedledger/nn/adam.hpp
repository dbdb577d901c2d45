#pragma once

#include <cstdint>
#include <vector>

#include "fedledger/nn/param_vector.hpp"

namespace fedledger::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step_count = 0;
  AdamConfig config;

  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg) : m(n, 0.0), v(n, 0.0), config(cfg) {}

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected Adam update, in place.
void adam_step(ParamVector& params, const ParamVector& grads, AdamState& state);

}  // namespace fedledger::nn
