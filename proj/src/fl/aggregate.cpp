#include <cmath>

#include "fedledger/errors.hpp"
#include "fedledger/fl/strategies.hpp"

namespace fedledger::fl {

Strategy parse_strategy(const std::string& name) {
  if (name == "fedavg") return Strategy::fedavg;
  if (name == "fedprox") return Strategy::fedprox;
  if (name == "fedyogi") return Strategy::fedyogi;
  if (name == "scaffold") return Strategy::scaffold;
  if (name == "single") return Strategy::single;
  throw ConfigError("unknown federated strategy '" + name + "'", "/fl");
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::fedavg: return "fedavg";
    case Strategy::fedprox: return "fedprox";
    case Strategy::fedyogi: return "fedyogi";
    case Strategy::scaffold: return "scaffold";
    case Strategy::single: return "single";
  }
  return "?";
}

nn::ParamVector fedavg_aggregate(std::span<const ClientUpdate> updates) {
  if (updates.empty()) throw ProtocolError("aggregation over zero client updates");
  std::size_t total = 0;
  for (const auto& u : updates) {
    if (u.samples == 0) throw ProtocolError("client " + std::to_string(u.client) + " reported zero samples");
    if (!(u.params.same_shape(updates[0].params) && u.params.size() == updates[0].params.size()))
      throw ProtocolError("client " + std::to_string(u.client) + " returned a model of a different shape");
    total += u.samples;
  }
  // Offsets from the first client keep the identical-clients and single-client
  // cases exact.
  const auto& base = updates[0].params.values;
  nn::ParamVector out = updates[0].params;
  const double n_total = static_cast<double>(total);
  for (std::size_t w = 1; w < updates.size(); ++w) {
    const double weight = static_cast<double>(updates[w].samples) / n_total;
    const auto& v = updates[w].params.values;
    for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += weight * (v[j] - base[j]);
  }
  return out;
}

double fedprox_penalty(const nn::ParamVector& local, const nn::ParamVector& global, double mu,
                       nn::ParamVector* grad) {
  if (local.values.size() != global.values.size()) throw ShapeError("fedprox_penalty: shapes differ");
  if (grad && grad->values.size() != local.values.size()) throw ShapeError("fedprox_penalty: gradient shape");
  double sq = 0.0;
  for (std::size_t j = 0; j < local.values.size(); ++j) {
    const double d = local.values[j] - global.values[j];
    sq += d * d;
    if (grad) grad->values[j] += mu * d;
  }
  return 0.5 * mu * sq;
}

double ProxHook::param_penalty(const nn::ParamVector& params, nn::ParamVector& grad) {
  if (mu_ == 0.0) return 0.0;
  return fedprox_penalty(params, global_, mu_, &grad);
}

nn::ParamVector fedyogi_server_update(YogiServerState& state, const nn::ParamVector& prev,
                                      std::span<const ClientUpdate> updates) {
  const nn::ParamVector avg = fedavg_aggregate(updates);
  if (!(avg.same_shape(prev) && avg.size() == prev.size())) throw ProtocolError("fedyogi: client models differ from the server model");
  const std::size_t n = prev.values.size();
  if (state.m.empty()) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
  }
  if (state.m.size() != n || state.v.size() != n) throw ProtocolError("fedyogi: optimizer state has wrong length");
  const auto& cfg = state.config;
  nn::ParamVector next = prev;
  for (std::size_t j = 0; j < n; ++j) {
    const double delta = avg.values[j] - prev.values[j];
    const double d2 = delta * delta;
    state.m[j] = cfg.beta1 * state.m[j] + (1.0 - cfg.beta1) * delta;
    const double diff = state.v[j] - d2;
    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    state.v[j] = state.v[j] - (1.0 - cfg.beta2) * d2 * sign;
    next.values[j] = prev.values[j] + cfg.server_lr * state.m[j] / (std::sqrt(state.v[j]) + cfg.tau);
    if (!std::isfinite(next.values[j]) || !std::isfinite(state.v[j]))
      throw NumericError("fedyogi: non-finite server update");
  }
  return next;
}

}  // namespace fedledger::fl
