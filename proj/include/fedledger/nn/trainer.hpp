#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "fedledger/nn/adam.hpp"
#include "fedledger/nn/autoencoder.hpp"
#include "fedledger/rng.hpp"

namespace fedledger::nn {

// Interceptor for the local training loop. Continual-learning strategies and
// federated local objectives plug in here; the default implementation of
// every method leaves the step untouched.
class LossHook {
 public:
  virtual ~LossHook() = default;

  // May append rows to the sampled batch.
  virtual void augment(Matrix& /*batch*/) {}

  // Output-space penalty. Adds d(penalty)/d(output) into d_output, already
  // divided by the batch size, and returns the batch-mean penalty value.
  virtual double output_penalty(const Matrix& /*batch*/, const Matrix& /*output*/,
                                Matrix& /*d_output*/) {
    return 0.0;
  }

  // Parameter-space penalty. Adds its gradient into grad and returns its value.
  virtual double param_penalty(const ParamVector& /*params*/, ParamVector& /*grad*/) {
    return 0.0;
  }

  // Last chance to rewrite the gradient before the optimizer sees it.
  virtual void correct_gradient(ParamVector& /*grad*/) {}
};

struct EarlyStopping {
  std::size_t patience = 5;
  double min_delta = 1e-5;
  std::size_t interval = 50;  // iterations per evaluation window
};

struct TrainOptions {
  std::size_t iterations = 1000;
  std::size_t batch_size = 16;
  double theta_mix = kDefaultThetaMix;
  std::optional<EarlyStopping> early_stopping;
};

struct TrainStats {
  std::size_t steps = 0;
  double mean_loss = 0.0;  // mean reconstruction loss over all steps
  double last_loss = 0.0;
};

// Runs sampled mini-batch Adam steps on `data`. Batches are drawn without
// replacement within an epoch; a new seeded shuffle starts whenever fewer
// than batch_size rows remain.
TrainStats train_iterations(ParamVector& params, AdamState& state, const ArchitectureSpec& spec,
                            const SegmentLayout& layout, const Matrix& data,
                            const TrainOptions& options, Rng& rng,
                            std::span<LossHook* const> hooks = {});

}  // namespace fedledger::nn
