#include "fedledger/cli/config_io.hpp"

#include <cstdint>
#include <cstdio>
#include <set>

#include "fedledger/errors.hpp"
#include "fedledger/eval/report.hpp"

namespace fedledger::cli {

namespace {

using nlohmann::json;

std::string type_name(const json& v) { return v.type_name(); }

// Walks one JSON object, remembering which keys were consumed so the rest
// can be rejected.
class Obj {
 public:
  Obj(const json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {
    if (!j_.is_object()) throw ConfigError("expected an object, got " + type_name(j_), ptr_.empty() ? "/" : ptr_);
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }
  std::string at(const std::string& key) const { return ptr_ + "/" + key; }

  void size(const std::string& key, std::size_t& out) {
    if (auto v = get(key)) out = as_size(*v, at(key));
  }
  void number(const std::string& key, double& out) {
    if (auto v = get(key)) out = as_number(*v, at(key));
  }
  void boolean(const std::string& key, bool& out) {
    if (auto v = get(key)) {
      if (!v->is_boolean()) throw ConfigError("expected a boolean, got " + type_name(*v), at(key));
      out = v->get<bool>();
    }
  }
  void string(const std::string& key, std::string& out) {
    if (auto v = get(key)) out = as_string(*v, at(key));
  }
  // A single string or an array of strings.
  void strings(const std::string& key, std::vector<std::string>& out) {
    auto v = get(key);
    if (!v) return;
    out.clear();
    if (v->is_string()) {
      out.push_back(v->get<std::string>());
      return;
    }
    if (!v->is_array()) throw ConfigError("expected a string or an array of strings, got " + type_name(*v), at(key));
    for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_string((*v)[i], at(key) + "/" + std::to_string(i)));
  }
  Obj child(const std::string& key) {
    static const json empty = json::object();
    auto v = get(key);
    return Obj(v ? *v : empty, at(key));
  }
  bool has(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it != j_.end() && !it->is_null();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key", ptr_ + "/" + it.key());
  }

  static std::size_t as_size(const json& v, const std::string& p) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer()) {
      if (v.get<std::int64_t>() < 0) throw ConfigError("must be non-negative", p);
      return static_cast<std::size_t>(v.get<std::int64_t>());
    }
    throw ConfigError("expected a non-negative integer, got " + type_name(v), p);
  }
  static double as_number(const json& v, const std::string& p) {
    if (!v.is_number()) throw ConfigError("expected a number, got " + type_name(v), p);
    return v.get<double>();
  }
  static std::string as_string(const json& v, const std::string& p) {
    if (!v.is_string()) throw ConfigError("expected a string, got " + type_name(v), p);
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string ptr_;
  std::set<std::string> seen_;
};

json opt_size(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

sim::RunConfig config_from_json(const json& doc) {
  sim::RunConfig c;
  Obj root(doc, "");

  {
    auto ds = root.child("dataset");
    ds.string("kind", c.dataset.kind);
    ds.string("path", c.dataset.path);
    ds.string("cache_dir", c.dataset.cache_dir);
    ds.strings("departments", c.dataset.departments);
    auto syn = ds.child("synthetic");
    syn.size("departments", c.dataset.synth.n_departments);
    syn.size("rows_per_department", c.dataset.synth.rows_per_department);
    syn.size("categorical", c.dataset.synth.n_categorical);
    syn.size("numerical", c.dataset.synth.n_numerical);
    syn.size("cardinality", c.dataset.synth.cardinality);
    syn.size("prototypes", c.dataset.synth.prototypes);
    syn.number("fidelity", c.dataset.synth.prototype_fidelity);
    std::size_t synth_seed = c.dataset.synth.seed;
    syn.size("seed", synth_seed);
    c.dataset.synth.seed = synth_seed;
    syn.finish();
    ds.finish();
  }

  if (auto v = root.get("scenario")) {
    if (!v->is_number_integer()) throw ConfigError("expected an integer, got " + type_name(*v), "/scenario");
    c.scenario = v->get<int>();
  }
  root.number("sparsity_p", c.sparsity_p);
  if (auto v = root.get("schedule")) {
    std::vector<std::vector<std::vector<bool>>> m;
    if (!v->is_array()) throw ConfigError("expected a [client][experience][department] array", "/schedule");
    for (std::size_t w = 0; w < v->size(); ++w) {
      const auto& row = (*v)[w];
      const std::string pw = "/schedule/" + std::to_string(w);
      if (!row.is_array()) throw ConfigError("expected an array", pw);
      auto& mw = m.emplace_back();
      for (std::size_t t = 0; t < row.size(); ++t) {
        const auto& cell = row[t];
        const std::string pt = pw + "/" + std::to_string(t);
        if (!cell.is_array()) throw ConfigError("expected an array", pt);
        auto& mt = mw.emplace_back();
        for (std::size_t d = 0; d < cell.size(); ++d) {
          if (!cell[d].is_boolean()) throw ConfigError("expected a boolean", pt + "/" + std::to_string(d));
          mt.push_back(cell[d].get<bool>());
        }
      }
    }
    c.schedule = std::move(m);
  }

  root.strings("architecture", c.architectures);
  root.strings("fl", c.fl);
  root.strings("cl", c.cl);
  root.size("T", c.T);
  root.size("R", c.R);
  root.size("eta", c.eta);
  root.size("rho", c.rho);
  root.size("gamma", c.gamma);
  root.size("L", c.L);
  root.size("M", c.M);
  root.size("scale", c.scale);
  if (auto v = root.get("seeds")) {
    if (!v->is_array()) throw ConfigError("expected an array of integers", "/seeds");
    c.seeds.clear();
    for (std::size_t i = 0; i < v->size(); ++i) c.seeds.push_back(Obj::as_size((*v)[i], "/seeds/" + std::to_string(i)));
  }
  root.number("theta", c.theta_mix);
  {
    auto a = root.child("adam");
    a.number("lr", c.adam.lr);
    a.number("beta1", c.adam.beta1);
    a.number("beta2", c.adam.beta2);
    a.number("epsilon", c.adam.epsilon);
    a.finish();
  }
  if (root.has("early_stopping")) {
    auto e = root.child("early_stopping");
    nn::EarlyStopping es;
    e.size("patience", es.patience);
    e.number("min_delta", es.min_delta);
    e.size("interval", es.interval);
    e.finish();
    c.early_stopping = es;
  }
  {
    auto e = root.child("ewc");
    e.number("lambda", c.ewc_lambda);
    e.size("fisher_samples", c.fisher_samples);
    e.finish();
    auto l = root.child("lwf");
    l.number("alpha", c.lwf_alpha);
    l.finish();
    auto r = root.child("replay");
    r.size("capacity", c.buffer_capacity);
    r.boolean("exclude_anomalies", c.replay_exclude_anomalies);
    r.finish();
    auto p = root.child("fedprox");
    p.number("mu", c.prox_mu);
    p.finish();
    auto y = root.child("fedyogi");
    y.number("beta1", c.yogi.beta1);
    y.number("beta2", c.yogi.beta2);
    y.number("tau", c.yogi.tau);
    y.number("server_lr", c.yogi.server_lr);
    y.finish();
    auto s = root.child("scaffold");
    s.number("server_lr", c.scaffold.server_lr);
    s.boolean("pin_zero", c.scaffold.pin_zero);
    s.boolean("reset_each_experience", c.scaffold.reset_each_experience);
    s.finish();
  }
  {
    auto a = root.child("anomalies");
    a.number("fraction", c.anomaly_fraction);
    if (auto v = a.get("global")) c.k_global = Obj::as_size(*v, "/anomalies/global");
    if (auto v = a.get("local")) c.k_local = Obj::as_size(*v, "/anomalies/local");
    a.size("f_min", c.f_min);
    a.size("max_resample", c.max_resample);
    a.size("pool_tokens", c.pool_tokens);
    a.finish();
    auto e = root.child("evaluation");
    e.boolean("cumulative", c.cumulative_eval);
    e.boolean("other_class_as_negative", c.ap_other_as_negative);
    e.finish();
  }
  root.string("out_dir", c.out_dir);
  root.size("threads", c.threads);
  root.finish();

  sim::validate(c);
  return c;
}

json config_to_json(const sim::RunConfig& c) {
  json j;
  j["dataset"] = {
      {"kind", c.dataset.kind},
      {"path", c.dataset.path},
      {"cache_dir", c.dataset.cache_dir},
      {"departments", c.dataset.departments},
      {"synthetic",
       {{"departments", c.dataset.synth.n_departments},
        {"rows_per_department", c.dataset.synth.rows_per_department},
        {"categorical", c.dataset.synth.n_categorical},
        {"numerical", c.dataset.synth.n_numerical},
        {"cardinality", c.dataset.synth.cardinality},
        {"prototypes", c.dataset.synth.prototypes},
        {"fidelity", c.dataset.synth.prototype_fidelity},
        {"seed", c.dataset.synth.seed}}},
  };
  j["scenario"] = c.scenario;
  j["sparsity_p"] = c.sparsity_p;
  j["schedule"] = c.schedule ? json(*c.schedule) : json(nullptr);
  j["architecture"] = c.architectures;
  j["fl"] = c.fl;
  j["cl"] = c.cl;
  j["T"] = c.T;
  j["R"] = c.R;
  j["eta"] = c.eta;
  j["rho"] = c.rho;
  j["gamma"] = c.gamma;
  j["L"] = c.L;
  j["M"] = c.M;
  j["seeds"] = c.seeds;
  j["scale"] = c.scale;
  j["theta"] = c.theta_mix;
  j["adam"] = {{"lr", c.adam.lr}, {"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"epsilon", c.adam.epsilon}};
  j["early_stopping"] = c.early_stopping ? json{{"patience", c.early_stopping->patience},
                                                {"min_delta", c.early_stopping->min_delta},
                                                {"interval", c.early_stopping->interval}}
                                         : json(nullptr);
  j["ewc"] = {{"lambda", c.ewc_lambda}, {"fisher_samples", c.fisher_samples}};
  j["lwf"] = {{"alpha", c.lwf_alpha}};
  j["replay"] = {{"capacity", c.buffer_capacity}, {"exclude_anomalies", c.replay_exclude_anomalies}};
  j["fedprox"] = {{"mu", c.prox_mu}};
  j["fedyogi"] = {{"beta1", c.yogi.beta1}, {"beta2", c.yogi.beta2}, {"tau", c.yogi.tau}, {"server_lr", c.yogi.server_lr}};
  j["scaffold"] = {{"server_lr", c.scaffold.server_lr},
                   {"pin_zero", c.scaffold.pin_zero},
                   {"reset_each_experience", c.scaffold.reset_each_experience}};
  j["anomalies"] = {{"fraction", c.anomaly_fraction}, {"global", opt_size(c.k_global)},
                    {"local", opt_size(c.k_local)},   {"f_min", c.f_min},
                    {"max_resample", c.max_resample}, {"pool_tokens", c.pool_tokens}};
  j["evaluation"] = {{"cumulative", c.cumulative_eval}, {"other_class_as_negative", c.ap_other_as_negative}};
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  return j;
}

std::string canonical_config(const sim::RunConfig& config) { return config_to_json(config).dump(); }

std::string run_id(const sim::RunConfig& config) {
  // out_dir and threads do not change results
  auto j = config_to_json(config);
  j.erase("out_dir");
  j.erase("threads");
  const std::string text = j.dump() + "\n" + FEDLEDGER_VERSION;
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::string pointer;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("empty key in override '" + assignment + "'");
    pointer += "/" + key;
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) throw ConfigError("override descends into a non-object", pointer);
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

sim::RunConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  json doc = json::object();
  if (!path.empty()) {
    const std::string text = eval::read_text(path);
    doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("not valid JSON: " + path.string());
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return config_from_json(doc);
}

}  // namespace fedledger::cli
