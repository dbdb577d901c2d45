#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fedledger/cl/regularizers.hpp"
#include "fedledger/cl/replay.hpp"
#include "fedledger/nn/adam.hpp"
#include "fedledger/nn/trainer.hpp"

namespace fedledger::cl {

enum class Strategy { scratch, sequential, replay, lwf, ewc };

Strategy parse_strategy(const std::string& name);  // ConfigError on unknown names
const char* to_string(Strategy s);

struct ClConfig {
  Strategy strategy = Strategy::sequential;
  std::size_t buffer_capacity = 1000;
  bool replay_exclude_anomalies = false;
  double ewc_lambda = kDefaultEwcLambda;
  std::size_t fisher_samples = 1000;
  double lwf_alpha = kDefaultLwfAlpha;
  double theta_mix = nn::kDefaultThetaMix;
};

// Model every strategy starts experience t (0-based) from. Scratch draws a
// fresh model seeded by (seed, t); the t = 0 model is the shared initial
// model of the run, so all strategies start identically.
nn::ParamVector experience_init(const nn::ArchitectureSpec& spec, std::uint64_t seed, std::size_t t);

nn::ParamVector begin_experience_params(Strategy s, const nn::ArchitectureSpec& spec, std::uint64_t seed,
                                        std::size_t t, const nn::ParamVector& incoming);

// Per-client continual-learning state and the training hooks it exposes.
class ClientLearner {
 public:
  ClientLearner(ClConfig config, nn::ArchitectureSpec spec, nn::SegmentLayout layout, std::uint64_t seed,
                std::size_t client);
  ~ClientLearner();
  ClientLearner(ClientLearner&&) noexcept;
  ClientLearner& operator=(ClientLearner&&) noexcept;

  const ClConfig& config() const { return config_; }

  // Training-ready parameters for experience t and a fresh optimizer.
  nn::ParamVector begin_experience(std::size_t t, const nn::ParamVector& incoming, nn::AdamState& adam,
                                   const nn::AdamConfig& adam_config);

  // Hooks for the local training loop of the current experience.
  std::vector<nn::LossHook*> hooks();

  // End-of-experience bookkeeping on the post-aggregation model: buffer
  // update, Fisher estimate, frozen LwF teacher.
  void end_experience(std::size_t t, const nn::ParamVector& central, const data::EncodedBatch& experience);

  const ReplayBuffer& buffer() const { return buffer_; }
  const EwcState& ewc() const { return ewc_; }
  const std::optional<nn::ParamVector>& teacher() const { return teacher_; }

 private:
  struct Hooks;

  ClConfig config_;
  nn::ArchitectureSpec spec_;
  nn::SegmentLayout layout_;
  std::uint64_t seed_;
  std::size_t client_;
  ReplayBuffer buffer_;
  EwcState ewc_;
  std::optional<nn::ParamVector> teacher_;
  std::unique_ptr<Hooks> hooks_;
};

}  // namespace fedledger::cl
