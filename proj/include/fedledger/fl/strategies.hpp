#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fedledger/nn/param_vector.hpp"
#include "fedledger/nn/trainer.hpp"

namespace fedledger::fl {

enum class Strategy { fedavg, fedprox, fedyogi, scaffold, single };

Strategy parse_strategy(const std::string& name);  // ConfigError on unknown names
const char* to_string(Strategy s);

inline constexpr double kDefaultProxMu = 1.2;

struct ClientUpdate {
  std::size_t client = 0;
  nn::ParamVector params;
  std::size_t samples = 0;
  std::vector<double> control_delta;  // Scaffold only
};

// sum_w (n_w / N) theta_w, evaluated as theta_0 + sum_w (n_w / N)(theta_w - theta_0).
// Throws ProtocolError on an empty list, a zero
// sample count or mismatched shapes.
nn::ParamVector fedavg_aggregate(std::span<const ClientUpdate> updates);

// (mu/2) ||local - global||^2; adds mu (local - global) into grad if given.
double fedprox_penalty(const nn::ParamVector& local, const nn::ParamVector& global, double mu,
                       nn::ParamVector* grad = nullptr);

class ProxHook final : public nn::LossHook {
 public:
  ProxHook(const nn::ParamVector& global, double mu) : global_(global), mu_(mu) {}
  double param_penalty(const nn::ParamVector& params, nn::ParamVector& grad) override;

 private:
  const nn::ParamVector& global_;
  double mu_;
};

struct YogiConfig {
  double beta1 = 0.9;
  double beta2 = 0.99;
  double tau = 1e-3;
  double server_lr = 1e-2;
};

struct YogiServerState {
  std::vector<double> m;
  std::vector<double> v;
  YogiConfig config;
};

// Delta = fedavg(updates) - prev; Yogi moments; prev + lr m / (sqrt(v) + tau).
// Moments are created on first use.
nn::ParamVector fedyogi_server_update(YogiServerState& state, const nn::ParamVector& prev,
                                      std::span<const ClientUpdate> updates);

struct ScaffoldConfig {
  double server_lr = 1.0;
  bool pin_zero = false;               // keep every control variate at zero
  bool reset_each_experience = false;  // zero the variates when an experience starts
};

struct ScaffoldState {
  std::vector<double> c;
  std::vector<std::vector<double>> c_client;
  ScaffoldConfig config;

  void init(std::size_t n_params, std::size_t n_clients);
  void reset();
};

// Option II: c_w+ = c_w - c + (x - y) / (K eta_l).
std::vector<double> scaffold_option2(std::span<const double> x, std::span<const double> y,
                                     std::span<const double> c, std::span<const double> c_client,
                                     std::size_t k_steps, double eta_l);

// Adds (c - c_w) to every raw local gradient before the optimizer.
class ScaffoldHook final : public nn::LossHook {
 public:
  ScaffoldHook(const std::vector<double>& c, const std::vector<double>& c_client) : c_(c), c_client_(c_client) {}
  void correct_gradient(nn::ParamVector& grad) override;

 private:
  const std::vector<double>& c_;
  const std::vector<double>& c_client_;
};

// Client side after local training: stores c_w+ and returns c_w+ - c_w.
// With pin_zero the variates stay zero and the delta is zero.
std::vector<double> scaffold_finish_local(ScaffoldState& state, std::size_t client, const nn::ParamVector& x,
                                          const nn::ParamVector& y, std::size_t k_steps, double eta_l);

// theta_prev + eta_g (fedavg(y) - theta_prev), c += (1/M) sum dc. Requires
// every one of the M clients to report; otherwise ProtocolError.
nn::ParamVector scaffold_server_update(ScaffoldState& state, const nn::ParamVector& prev,
                                       std::span<const ClientUpdate> updates);

}  // namespace fedledger::fl
