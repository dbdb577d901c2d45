#pragma once

#include <span>

#include "fedledger/nn/layout.hpp"

namespace fedledger::nn {

inline constexpr double kDefaultThetaMix = 2.0 / 3.0;
inline constexpr double kProbabilityClamp = 1e-6;

struct LossBreakdown {
  double total = 0.0;
  double bce_part = 0.0;
  double mse_part = 0.0;
  double theta_mix = kDefaultThetaMix;
};

// Combined reconstruction loss of one encoded row.
//
// Categorical segments: the Tanh output y is mapped to p = (y + 1) / 2,
// clamped to [1e-6, 1 - 1e-6], and scored with binary cross-entropy against
// the one-hot target, averaged over the segment width and then over the
// categorical attributes. Numerical slots: squared error averaged over the
// numerical attributes. total = theta * bce + (1 - theta) * mse.
//
// If `d_output` is non-empty it receives d total / d output (overwritten).
LossBreakdown reconstruction_loss(const SegmentLayout& layout, std::span<const double> target,
                                  std::span<const double> output, double theta_mix,
                                  std::span<double> d_output = {});

}  // namespace fedledger::nn
