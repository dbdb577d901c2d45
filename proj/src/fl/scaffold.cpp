#include "fedledger/errors.hpp"
#include "fedledger/fl/strategies.hpp"

namespace fedledger::fl {

void ScaffoldState::init(std::size_t n_params, std::size_t n_clients) {
  c.assign(n_params, 0.0);
  c_client.assign(n_clients, std::vector<double>(n_params, 0.0));
}

void ScaffoldState::reset() {
  std::fill(c.begin(), c.end(), 0.0);
  for (auto& ci : c_client) std::fill(ci.begin(), ci.end(), 0.0);
}

std::vector<double> scaffold_option2(std::span<const double> x, std::span<const double> y,
                                     std::span<const double> c, std::span<const double> c_client,
                                     std::size_t k_steps, double eta_l) {
  if (k_steps == 0) throw ConfigError("scaffold: local step count K must be positive");
  if (!(eta_l > 0.0)) throw ConfigError("scaffold: local learning rate must be positive");
  const std::size_t n = x.size();
  if (y.size() != n || c.size() != n || c_client.size() != n) throw ShapeError("scaffold_option2: lengths differ");
  const double scale = 1.0 / (static_cast<double>(k_steps) * eta_l);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = c_client[j] - c[j] + (x[j] - y[j]) * scale;
  return out;
}

void ScaffoldHook::correct_gradient(nn::ParamVector& grad) {
  if (grad.values.size() != c_.size() || c_.size() != c_client_.size())
    throw ShapeError("scaffold: control variate length differs from the model");
  for (std::size_t j = 0; j < grad.values.size(); ++j) grad.values[j] += c_[j] - c_client_[j];
}

std::vector<double> scaffold_finish_local(ScaffoldState& state, std::size_t client, const nn::ParamVector& x,
                                          const nn::ParamVector& y, std::size_t k_steps, double eta_l) {
  if (client >= state.c_client.size()) throw ProtocolError("scaffold: unknown client " + std::to_string(client));
  auto& ci = state.c_client[client];
  if (state.config.pin_zero) return std::vector<double>(ci.size(), 0.0);
  auto plus = scaffold_option2(x.values, y.values, state.c, ci, k_steps, eta_l);
  std::vector<double> delta(plus.size());
  for (std::size_t j = 0; j < plus.size(); ++j) delta[j] = plus[j] - ci[j];
  ci = std::move(plus);
  return delta;
}

nn::ParamVector scaffold_server_update(ScaffoldState& state, const nn::ParamVector& prev,
                                       std::span<const ClientUpdate> updates) {
  const std::size_t m = state.c_client.size();
  if (updates.size() != m)
    throw ProtocolError("scaffold needs all " + std::to_string(m) + " clients each round, got " +
                        std::to_string(updates.size()));
  nn::ParamVector avg = fedavg_aggregate(updates);
  if (!(avg.same_shape(prev) && avg.size() == prev.size())) throw ProtocolError("scaffold: client models differ from the server model");

  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<double> sum(state.c.size(), 0.0);
  for (const auto& u : updates) {
    if (u.control_delta.size() != state.c.size())
      throw ProtocolError("scaffold: client " + std::to_string(u.client) + " sent no control-variate delta");
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += u.control_delta[j];
  }
  if (!state.config.pin_zero)
    for (std::size_t j = 0; j < sum.size(); ++j) state.c[j] += inv_m * sum[j];

  const double eta_g = state.config.server_lr;
  if (eta_g == 1.0) return avg;
  nn::ParamVector next = prev;
  for (std::size_t j = 0; j < next.values.size(); ++j)
    next.values[j] = prev.values[j] + eta_g * (avg.values[j] - prev.values[j]);
  return next;
}

}  // namespace fedledger::fl
