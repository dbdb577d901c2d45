#include "fedledger/sim/simulation.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <optional>
#include <thread>

#include "fedledger/anomaly/injector.hpp"
#include "fedledger/cl/strategy.hpp"
#include "fedledger/data/csv.hpp"
#include "fedledger/data/schedule.hpp"
#include "fedledger/data/streams.hpp"
#include "fedledger/data/synth.hpp"
#include "fedledger/errors.hpp"
#include "fedledger/eval/report.hpp"
#include "fedledger/fl/strategies.hpp"
#include "json.hpp"

namespace fedledger::sim {

namespace {

using nlohmann::ordered_json;

ordered_json pool_to_json(const anomaly::AnomalyPool& pool) {
  ordered_json j;
  j["categorical"] = pool.categorical;
  j["numeric_excess_min"] = pool.numeric_excess_min;
  j["numeric_excess_max"] = pool.numeric_excess_max;
  return j;
}

anomaly::AnomalyPool pool_from_json(const nlohmann::json& j) {
  anomaly::AnomalyPool pool;
  pool.categorical = j.at("categorical").get<std::vector<std::vector<std::string>>>();
  pool.numeric_excess_min = j.at("numeric_excess_min").get<double>();
  pool.numeric_excess_max = j.at("numeric_excess_max").get<double>();
  return pool;
}

template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < std::min(workers, n); ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

nn::ArchitectureSpec make_spec(const std::string& arch, std::size_t width) {
  return arch == "deep" ? nn::ArchitectureSpec::deep(width) : nn::ArchitectureSpec::shallow(width);
}

struct ClientRound {
  std::optional<fl::ClientUpdate> update;
  nn::TrainStats stats;
};

}  // namespace

data::EncodedBatch client_experience_batch(const RunConfig& c, const PreparedData& prepared,
                                    const data::ExperienceStream& stream, std::size_t t, std::uint64_t seed) {
  data::EncodedBatch out;
  out.rows = nn::Matrix(0, prepared.dataset.schema.width());
  const auto& per_dept = stream.experiences[t];
  for (std::size_t d = 0; d < per_dept.size(); ++d) {
    if (per_dept[d].empty()) continue;
    auto sub = prepared.dataset.batch(per_dept[d]);
    if (stream.client == 0) {
      Rng rng = make_rng(seed, "inject", {t, d});
      const std::size_t n = sub.size();
      anomaly::inject_global(sub, c.k_global.value_or(anomaly::default_anomaly_count(n, c.anomaly_fraction)),
                             prepared.dataset.schema, prepared.pool, rng);
      anomaly::inject_local(sub, c.k_local.value_or(anomaly::default_anomaly_count(n, c.anomaly_fraction)),
                            prepared.dataset.schema, rng, {c.f_min, c.max_resample});
    }
    out.append(sub);
  }
  return out;
}

PreparedData prepare_data(const RunConfig& c) {
  const auto& ds = c.dataset;
  const std::filesystem::path cache = ds.cache_dir;
  if (!ds.cache_dir.empty() && std::filesystem::exists(cache / "schema.json") &&
      std::filesystem::exists(cache / "pool.json")) {
    PreparedData p;
    p.dataset = data::load_encoded(cache);
    p.pool = pool_from_json(nlohmann::json::parse(eval::read_text(cache / "pool.json")));
    if (p.dataset.department_names.size() < c.L)
      throw ConfigError("cached dataset has " + std::to_string(p.dataset.department_names.size()) +
                            " departments, fewer than L",
                        "/L");
    return p;
  }

  data::RawTable table;
  std::vector<std::string> departments = ds.departments;
  if (ds.kind == "synthetic") {
    table = data::synthesize_dataset(ds.synth).table;
    if (departments.empty()) departments = table.departments();
  } else {
    const auto profile = data::builtin_profile(ds.kind);
    if (ds.path.empty()) throw ConfigError("a CSV path is required", "/dataset/path");
    table = data::load_city_csv(ds.path, profile);
    if (departments.empty()) departments = profile.default_departments;
  }
  if (departments.size() < c.L)
    throw ConfigError("only " + std::to_string(departments.size()) + " departments available, L is " +
                          std::to_string(c.L),
                      "/L");
  departments.resize(c.L);

  PreparedData p;
  p.pool = anomaly::make_pool(table.filter_departments(departments), c.pool_tokens);
  p.dataset = data::encode_table(table, departments, p.pool);
  if (!ds.cache_dir.empty()) {
    data::save_encoded(p.dataset, cache);
    eval::write_text(cache / "pool.json", pool_to_json(p.pool).dump(2) + "\n");
  }
  return p;
}

eval::MetricsRecord evaluate_experience(const nn::ParamVector& params, const nn::ArchitectureSpec& spec,
                                        const nn::SegmentLayout& layout, const data::EncodedBatch& audit,
                                        const std::vector<std::string>& department_names, double theta_mix,
                                        bool other_as_negative) {
  eval::MetricsRecord rec;
  const auto scored = eval::score_rows(params, spec, layout, audit, theta_mix);
  rec.ap_global = eval::ap_per_class(scored, data::AnomalyLabel::global, other_as_negative);
  rec.ap_local = eval::ap_per_class(scored, data::AnomalyLabel::local, other_as_negative);
  std::vector<std::size_t> order;
  std::vector<std::pair<double, std::size_t>> acc(department_names.size(), {0.0, 0});
  double total = 0.0;
  for (const auto& s : scored) {
    if (s.department >= acc.size()) throw ShapeError("evaluate_experience: unknown department index");
    if (acc[s.department].second == 0) order.push_back(s.department);
    acc[s.department].first += s.error;
    ++acc[s.department].second;
    total += s.error;
  }
  std::sort(order.begin(), order.end());
  for (std::size_t d : order)
    rec.departments.push_back(
        {department_names[d], acc[d].first / static_cast<double>(acc[d].second), acc[d].second});
  rec.mean_rec_error = scored.empty() ? 0.0 : total / static_cast<double>(scored.size());
  return rec;
}

RunResult run_simulation(const RunConfig& config, const PreparedData& data) {
  return run_simulation(config, data, {});
}

RunResult run_simulation(const RunConfig& c, const PreparedData& prepared, const ProgressFn& progress) {
  validate(c);
  const auto& dataset = prepared.dataset;
  if (dataset.department_names.size() != c.L)
    throw ConfigError("prepared data has " + std::to_string(dataset.department_names.size()) +
                          " departments but L is " + std::to_string(c.L),
                      "/L");
  const auto layout = dataset.schema.layout();
  const auto by_dept = dataset.entries_by_department();
  const std::size_t workers = worker_count(c);

  RunResult result;
  {
    ordered_json head;
    head["event"] = "protocol";
    head["T"] = c.T;
    head["R"] = c.R;
    head["eta"] = c.eta;
    head["rho"] = c.rho;
    head["gamma"] = c.gamma;
    head["L"] = c.L;
    head["M"] = c.M;
    head["scale"] = c.scale;
    head["input_width"] = layout.width;
    result.transcript.push_back(head.dump());
  }

  nn::TrainOptions opts;
  opts.iterations = c.eta;
  opts.batch_size = c.gamma;
  opts.theta_mix = c.theta_mix;
  opts.early_stopping = c.early_stopping;

  for (std::uint64_t seed : c.seeds) {
    const auto schedule = c.schedule ? data::schedule_from_matrix(c.scenario, *c.schedule)
                                     : data::generate_schedule(c.scenario, c.M, c.T, c.L, c.sparsity_p,
                                                               derive_seed(seed, "schedule"));
    const auto streams =
        data::build_experience_streams(by_dept, dataset.department_names, schedule, c.rho, derive_seed(seed, "streams"));

    for (const auto& arch : c.architectures) {
      const auto spec = make_spec(arch, layout.width);
      for (const auto& fl_name : c.fl) {
        for (const auto& cl_name : c.cl) {
          const auto fl_s = fl::parse_strategy(fl_name);
          const auto cl_s = cl::parse_strategy(cl_name);

          cl::ClConfig clc;
          clc.strategy = cl_s;
          clc.buffer_capacity = c.buffer_capacity;
          clc.replay_exclude_anomalies = c.replay_exclude_anomalies;
          clc.ewc_lambda = c.ewc_lambda;
          clc.fisher_samples = c.fisher_samples;
          clc.lwf_alpha = c.lwf_alpha;
          clc.theta_mix = c.theta_mix;

          std::vector<std::size_t> participants;
          if (fl_s == fl::Strategy::single)
            participants.push_back(0);
          else
            for (std::size_t w = 0; w < c.M; ++w) participants.push_back(w);

          std::vector<cl::ClientLearner> learners;
          for (std::size_t w = 0; w < c.M; ++w) learners.emplace_back(clc, spec, layout, seed, w);
          std::vector<nn::AdamState> adam(c.M);

          nn::ParamVector central = cl::experience_init(spec, seed, 0);
          fl::YogiServerState yogi;
          yogi.config = c.yogi;
          fl::ScaffoldState scaffold;
          scaffold.config = c.scaffold;
          scaffold.init(central.size(), c.M);

          data::EncodedBatch audit_seen;
          audit_seen.rows = nn::Matrix(0, layout.width);

          for (std::size_t t = 0; t < c.T; ++t) {
            std::vector<data::EncodedBatch> batches(c.M);
            for (std::size_t w : participants) batches[w] = client_experience_batch(c, prepared, streams[w], t, seed);

            central = cl::begin_experience_params(cl_s, spec, seed, t, central);
            for (std::size_t w : participants) learners[w].begin_experience(t, central, adam[w], c.adam);
            if (fl_s == fl::Strategy::scaffold && c.scaffold.reset_each_experience) scaffold.reset();

            for (std::size_t r = 0; r < c.R; ++r) {
              const std::string broadcast_sum = nn::checksum(central);
              std::vector<ClientRound> rounds(participants.size());
              parallel_for(participants.size(), workers, [&](std::size_t i) {
                const std::size_t w = participants[i];
                const auto& batch = batches[w];
                if (batch.size() == 0) return;
                nn::ParamVector local = central;
                auto hooks = learners[w].hooks();
                std::optional<fl::ProxHook> prox;
                std::optional<fl::ScaffoldHook> correction;
                if (fl_s == fl::Strategy::fedprox) {
                  prox.emplace(central, c.prox_mu);
                  hooks.push_back(&*prox);
                }
                if (fl_s == fl::Strategy::scaffold && !c.scaffold.pin_zero) {
                  correction.emplace(scaffold.c, scaffold.c_client[w]);
                  hooks.push_back(&*correction);
                }
                Rng rng = make_rng(seed, "local_train", {w, t, r});
                rounds[i].stats = nn::train_iterations(local, adam[w], spec, layout, batch.rows, opts, rng, hooks);
                fl::ClientUpdate u;
                u.client = w;
                u.samples = batch.size();
                if (fl_s == fl::Strategy::scaffold)
                  u.control_delta = fl::scaffold_finish_local(scaffold, w, central, local, rounds[i].stats.steps, c.adam.lr);
                u.params = std::move(local);
                rounds[i].update = std::move(u);
              });

              std::vector<fl::ClientUpdate> updates;
              ordered_json clients = ordered_json::array();
              for (std::size_t i = 0; i < participants.size(); ++i) {
                if (!rounds[i].update) continue;
                ordered_json cj;
                cj["client"] = participants[i];
                cj["samples"] = rounds[i].update->samples;
                cj["steps"] = rounds[i].stats.steps;
                cj["mean_loss"] = rounds[i].stats.mean_loss;
                cj["last_loss"] = rounds[i].stats.last_loss;
                clients.push_back(std::move(cj));
                updates.push_back(std::move(*rounds[i].update));
              }
              if (!updates.empty()) {
                switch (fl_s) {
                  case fl::Strategy::fedyogi: central = fl::fedyogi_server_update(yogi, central, updates); break;
                  case fl::Strategy::scaffold: central = fl::scaffold_server_update(scaffold, central, updates); break;
                  default: central = fl::fedavg_aggregate(updates); break;
                }
              }
              ordered_json line;
              line["event"] = "round";
              line["seed"] = seed;
              line["arch"] = arch;
              line["fl"] = fl_name;
              line["cl"] = cl_name;
              line["t"] = t + 1;
              line["r"] = r + 1;
              line["iterations"] = c.eta;
              line["clients"] = std::move(clients);
              line["broadcast_checksum"] = broadcast_sum;
              line["checksum"] = nn::checksum(central);
              result.transcript.push_back(line.dump());
            }

            const data::EncodedBatch* eval_batch = &batches[0];
            if (c.cumulative_eval) {
              audit_seen.append(batches[0]);
              eval_batch = &audit_seen;
            }
            auto rec = evaluate_experience(central, spec, layout, *eval_batch, dataset.department_names, c.theta_mix,
                                           c.ap_other_as_negative);
            rec.seed = seed;
            rec.t = t + 1;
            rec.fl = fl_name;
            rec.cl = cl_name;
            rec.arch = arch;
            {
              ordered_json ej;
              ej["event"] = "evaluation";
              ej["seed"] = seed;
              ej["arch"] = arch;
              ej["fl"] = fl_name;
              ej["cl"] = cl_name;
              ej["t"] = t + 1;
              ej["rows"] = eval_batch->size();
              ej["ap_global"] = rec.ap_global ? ordered_json(*rec.ap_global) : ordered_json(nullptr);
              ej["ap_local"] = rec.ap_local ? ordered_json(*rec.ap_local) : ordered_json(nullptr);
              ej["mean_rec_error"] = rec.mean_rec_error;
              result.transcript.push_back(ej.dump());
            }
            if (progress) progress(rec);
            result.records.push_back(std::move(rec));

            for (std::size_t w : participants)
              if (batches[w].size() > 0) learners[w].end_experience(t, central, batches[w]);
          }
          result.final_models.push_back({seed, arch, fl_name, cl_name, central});
        }
      }
    }
  }
  return result;
}

}  // namespace fedledger::sim
