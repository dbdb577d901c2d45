#pragma once

#include <cstddef>
#include <vector>

#include "fedledger/nn/autoencoder.hpp"
#include "fedledger/nn/layout.hpp"
#include "fedledger/nn/loss.hpp"
#include "fedledger/nn/param_vector.hpp"
#include "fedledger/rng.hpp"

namespace fedledger::cl {

inline constexpr double kDefaultEwcLambda = 500.0;
inline constexpr double kDefaultLwfAlpha = 1.2;

struct EwcState {
  nn::ParamVector anchor;
  std::vector<double> fisher;
  double lambda = kDefaultEwcLambda;

  bool ready() const { return !fisher.empty(); }
};

// (lambda/2) * sum F_j (theta_j - anchor_j)^2. When grad is given,
// lambda * F (theta - anchor) is added into it.
double ewc_penalty(const nn::ParamVector& theta, const EwcState& state, nn::ParamVector* grad = nullptr);

// Mean of squared single-row reconstruction-loss gradients over n_samples
// rows drawn from data (without replacement while possible).
std::vector<double> estimate_fisher(const nn::ParamVector& params, const nn::ArchitectureSpec& spec,
                                    const nn::SegmentLayout& layout, const nn::Matrix& data,
                                    std::size_t n_samples, Rng& rng,
                                    double theta_mix = nn::kDefaultThetaMix);

// Row indices estimate_fisher uses for a given rng state.
std::vector<std::size_t> fisher_sample_rows(std::size_t n_rows, std::size_t n_samples, Rng& rng);

// alpha * mean over rows and columns of (new - old)^2. When d_new is given,
// 2 alpha (new - old) / (rows * cols) is added into it.
double lwf_distill_loss(const nn::Matrix& new_output, const nn::Matrix& old_output, double alpha,
                        nn::Matrix* d_new = nullptr);

}  // namespace fedledger::cl
