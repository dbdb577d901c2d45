#include "fedledger/nn/trainer.hpp"

#include <algorithm>
#include <limits>

#include "fedledger/errors.hpp"

namespace fedledger::nn {

namespace {

class EpochSampler {
 public:
  EpochSampler(std::size_t n_rows, std::size_t batch_size, Rng& rng)
      : order_(n_rows), batch_(std::min(batch_size, n_rows)), rng_(rng) {
    for (std::size_t i = 0; i < n_rows; ++i) order_[i] = i;
    cursor_ = order_.size();  // forces a shuffle on first use
  }

  std::span<const std::size_t> next() {
    if (order_.size() - cursor_ < batch_) {
      shuffle(order_, rng_);
      cursor_ = 0;
    }
    std::span<const std::size_t> out(order_.data() + cursor_, batch_);
    cursor_ += batch_;
    return out;
  }

 private:
  std::vector<std::size_t> order_;
  std::size_t batch_;
  std::size_t cursor_ = 0;
  Rng& rng_;
};

}  // namespace

TrainStats train_iterations(ParamVector& params, AdamState& state, const ArchitectureSpec& spec,
                            const SegmentLayout& layout, const Matrix& data,
                            const TrainOptions& options, Rng& rng,
                            std::span<LossHook* const> hooks) {
  if (data.rows == 0) throw ConfigError("train_iterations: empty training data");
  if (options.batch_size == 0) throw ConfigError("train_iterations: batch size must be positive");
  TrainStats stats;
  if (options.iterations == 0) return stats;

  EpochSampler sampler(data.rows, options.batch_size, rng);
  double loss_sum = 0.0;
  double window_sum = 0.0;
  std::size_t window_len = 0;
  double best_window = std::numeric_limits<double>::infinity();
  std::size_t stale_windows = 0;

  for (std::size_t it = 0; it < options.iterations; ++it) {
    Matrix batch = gather_rows(data, sampler.next());
    for (LossHook* h : hooks) h->augment(batch);

    ForwardCache cache = forward_cached(params, spec, batch);
    const Matrix& out = cache.output();
    Matrix d_out(out.rows, out.cols);
    const double inv_n = 1.0 / static_cast<double>(batch.rows);
    double rec = 0.0;
    for (std::size_t i = 0; i < batch.rows; ++i) {
      auto g = d_out.row(i);
      rec += reconstruction_loss(layout, batch.row(i), out.row(i), options.theta_mix, g).total;
      for (double& v : g) v *= inv_n;
    }
    rec *= inv_n;
    for (LossHook* h : hooks) h->output_penalty(batch, out, d_out);

    ParamVector grad = backprop(params, spec, cache, d_out);
    for (LossHook* h : hooks) h->param_penalty(params, grad);
    for (LossHook* h : hooks) h->correct_gradient(grad);
    adam_step(params, grad, state);

    ++stats.steps;
    loss_sum += rec;
    stats.last_loss = rec;

    if (options.early_stopping) {
      const auto& es = *options.early_stopping;
      window_sum += rec;
      if (++window_len == es.interval) {
        const double mean = window_sum / static_cast<double>(window_len);
        window_sum = 0.0;
        window_len = 0;
        if (mean < best_window - es.min_delta) {
          best_window = mean;
          stale_windows = 0;
        } else if (++stale_windows >= es.patience) {
          break;
        }
      }
    }
  }
  stats.mean_loss = loss_sum / static_cast<double>(stats.steps);
  return stats;
}

}  // namespace fedledger::nn
