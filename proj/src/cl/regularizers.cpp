#include "fedledger/cl/regularizers.hpp"

#include "fedledger/errors.hpp"

namespace fedledger::cl {

double ewc_penalty(const nn::ParamVector& theta, const EwcState& state, nn::ParamVector* grad) {
  const std::size_t n = theta.values.size();
  if (state.anchor.values.size() != n || state.fisher.size() != n)
    throw ShapeError("ewc_penalty: parameter, anchor and Fisher lengths differ");
  if (grad && grad->values.size() != n) throw ShapeError("ewc_penalty: gradient length differs");
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = theta.values[j] - state.anchor.values[j];
    sum += state.fisher[j] * d * d;
    if (grad) grad->values[j] += state.lambda * state.fisher[j] * d;
  }
  return 0.5 * state.lambda * sum;
}

std::vector<std::size_t> fisher_sample_rows(std::size_t n_rows, std::size_t n_samples, Rng& rng) {
  if (n_rows == 0) throw ConfigError("estimate_fisher: no data");
  if (n_samples <= n_rows) return sample_without_replacement(rng, n_rows, n_samples);
  std::vector<std::size_t> rows;
  rows.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) rows.push_back(uniform_index(rng, n_rows));
  return rows;
}

std::vector<double> estimate_fisher(const nn::ParamVector& params, const nn::ArchitectureSpec& spec,
                                    const nn::SegmentLayout& layout, const nn::Matrix& data,
                                    std::size_t n_samples, Rng& rng, double theta_mix) {
  if (n_samples == 0) throw ConfigError("estimate_fisher: n_samples must be positive");
  const auto rows = fisher_sample_rows(data.rows, n_samples, rng);
  std::vector<double> fisher(params.values.size(), 0.0);
  for (std::size_t r : rows) {
    const std::size_t one[] = {r};
    const auto g = nn::backward(params, spec, nn::gather_rows(data, one), layout, theta_mix).gradient;
    for (std::size_t j = 0; j < fisher.size(); ++j) fisher[j] += g.values[j] * g.values[j];
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& f : fisher) f *= inv;
  return fisher;
}

double lwf_distill_loss(const nn::Matrix& new_output, const nn::Matrix& old_output, double alpha,
                        nn::Matrix* d_new) {
  if (new_output.rows != old_output.rows || new_output.cols != old_output.cols)
    throw ShapeError("lwf_distill_loss: output shapes differ");
  if (d_new && (d_new->rows != new_output.rows || d_new->cols != new_output.cols))
    throw ShapeError("lwf_distill_loss: gradient shape differs");
  const std::size_t n = new_output.data.size();
  if (n == 0) return 0.0;
  const double inv = 1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = new_output.data[i] - old_output.data[i];
    sum += d * d;
    if (d_new) d_new->data[i] += 2.0 * alpha * d * inv;
  }
  return alpha * sum * inv;
}

}  // namespace fedledger::cl
