#include "fedledger/cl/strategy.hpp"

#include "fedledger/errors.hpp"

namespace fedledger::cl {

Strategy parse_strategy(const std::string& name) {
  if (name == "scratch") return Strategy::scratch;
  if (name == "sequential") return Strategy::sequential;
  if (name == "replay") return Strategy::replay;
  if (name == "lwf") return Strategy::lwf;
  if (name == "ewc") return Strategy::ewc;
  throw ConfigError("unknown continual-learning strategy '" + name + "'", "/cl");
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::scratch: return "scratch";
    case Strategy::sequential: return "sequential";
    case Strategy::replay: return "replay";
    case Strategy::lwf: return "lwf";
    case Strategy::ewc: return "ewc";
  }
  return "?";
}

nn::ParamVector experience_init(const nn::ArchitectureSpec& spec, std::uint64_t seed, std::size_t t) {
  return nn::init_model(spec, derive_seed(seed, "experience_init", {t}));
}

nn::ParamVector begin_experience_params(Strategy s, const nn::ArchitectureSpec& spec, std::uint64_t seed,
                                        std::size_t t, const nn::ParamVector& incoming) {
  if (s == Strategy::scratch) return experience_init(spec, seed, t);
  return incoming;
}

namespace {

class ReplayHook final : public nn::LossHook {
 public:
  const ReplayBuffer* buffer = nullptr;
  Rng rng;
  void augment(nn::Matrix& batch) override {
    if (buffer && buffer->size() > 0) batch = replay_augment(batch, *buffer, rng);
  }
};

class LwfHook final : public nn::LossHook {
 public:
  const nn::ParamVector* teacher = nullptr;
  const nn::ArchitectureSpec* spec = nullptr;
  double alpha = 0.0;
  double output_penalty(const nn::Matrix& batch, const nn::Matrix& output, nn::Matrix& d_output) override {
    if (!teacher || alpha == 0.0) return 0.0;
    const nn::Matrix old = nn::forward(*teacher, *spec, batch);
    return lwf_distill_loss(output, old, alpha, &d_output);
  }
};

class EwcHook final : public nn::LossHook {
 public:
  const EwcState* state = nullptr;
  double param_penalty(const nn::ParamVector& params, nn::ParamVector& grad) override {
    if (!state || !state->ready() || state->lambda == 0.0) return 0.0;
    return ewc_penalty(params, *state, &grad);
  }
};

}  // namespace

struct ClientLearner::Hooks {
  ReplayHook replay;
  LwfHook lwf;
  EwcHook ewc;
};

ClientLearner::ClientLearner(ClConfig config, nn::ArchitectureSpec spec, nn::SegmentLayout layout,
                             std::uint64_t seed, std::size_t client)
    : config_(config),
      spec_(std::move(spec)),
      layout_(std::move(layout)),
      seed_(seed),
      client_(client),
      hooks_(std::make_unique<Hooks>()) {
  buffer_.capacity = config_.buffer_capacity;
  buffer_.exclude_anomalies = config_.replay_exclude_anomalies;
  ewc_.lambda = config_.ewc_lambda;
}

ClientLearner::~ClientLearner() = default;
ClientLearner::ClientLearner(ClientLearner&&) noexcept = default;
ClientLearner& ClientLearner::operator=(ClientLearner&&) noexcept = default;

nn::ParamVector ClientLearner::begin_experience(std::size_t t, const nn::ParamVector& incoming,
                                                nn::AdamState& adam, const nn::AdamConfig& adam_config) {
  auto params = begin_experience_params(config_.strategy, spec_, seed_, t, incoming);
  adam = nn::AdamState(params.values.size(), adam_config);
  hooks_->replay.rng = make_rng(seed_, "replay_sample", {client_, t});
  return params;
}

std::vector<nn::LossHook*> ClientLearner::hooks() {
  std::vector<nn::LossHook*> out;
  switch (config_.strategy) {
    case Strategy::replay:
      hooks_->replay.buffer = &buffer_;
      out.push_back(&hooks_->replay);
      break;
    case Strategy::lwf:
      hooks_->lwf.teacher = teacher_ ? &*teacher_ : nullptr;
      hooks_->lwf.spec = &spec_;
      hooks_->lwf.alpha = config_.lwf_alpha;
      out.push_back(&hooks_->lwf);
      break;
    case Strategy::ewc:
      hooks_->ewc.state = &ewc_;
      out.push_back(&hooks_->ewc);
      break;
    default:
      break;
  }
  return out;
}

void ClientLearner::end_experience(std::size_t t, const nn::ParamVector& central,
                                   const data::EncodedBatch& experience) {
  switch (config_.strategy) {
    case Strategy::replay: {
      Rng rng = make_rng(seed_, "replay_update", {client_, t});
      replay_update_buffer(buffer_, experience, rng);
      break;
    }
    case Strategy::lwf:
      teacher_ = central;
      break;
    case Strategy::ewc: {
      if (experience.size() == 0) break;
      Rng rng = make_rng(seed_, "fisher", {client_, t});
      ewc_.fisher = estimate_fisher(central, spec_, layout_, experience.rows, config_.fisher_samples, rng,
                                    config_.theta_mix);
      ewc_.anchor = central;
      break;
    }
    default:
      break;
  }
}

}  // namespace fedledger::cl
