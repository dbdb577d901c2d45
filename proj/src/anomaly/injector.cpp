#include "fedledger/anomaly/injector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "fedledger/errors.hpp"

namespace fedledger::anomaly {

namespace {

std::vector<std::size_t> clean_rows(const data::EncodedBatch& batch) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < batch.size(); ++i)
    if (batch.labels[i] == data::AnomalyLabel::none) out.push_back(i);
  return out;
}

std::vector<std::size_t> pick_victims(const std::vector<std::size_t>& clean, std::size_t k, Rng& rng,
                                      const char* what) {
  if (k > clean.size())
    throw ConfigError(std::string(what) + ": " + std::to_string(k) + " anomalies requested but only " +
                      std::to_string(clean.size()) + " clean rows");
  std::vector<std::size_t> victims;
  for (std::size_t i : sample_without_replacement(rng, clean.size(), k)) victims.push_back(clean[i]);
  return victims;
}

void set_hot(std::span<double> row, const nn::Segment& seg, std::size_t value) {
  std::fill_n(row.begin() + static_cast<std::ptrdiff_t>(seg.offset), seg.width, 0.0);
  row[seg.offset + value] = 1.0;
}

void check_batch(const data::EncodedBatch& batch, const data::DatasetSchema& schema) {
  if (batch.rows.cols != schema.width()) throw ShapeError("injector: activity width does not match schema");
  if (batch.labels.size() != batch.size()) throw ShapeError("injector: label count does not match rows");
}

}  // namespace

AnomalyPool make_pool(const data::RawTable& table, std::size_t tokens_per_attribute) {
  AnomalyPool pool;
  pool.categorical.resize(table.categorical_names.size());
  for (std::size_t j = 0; j < table.categorical_names.size(); ++j) {
    std::set<std::string> seen;
    for (const auto& e : table.entries) seen.insert(e.categorical[j]);
    for (std::size_t i = 0; i < tokens_per_attribute; ++i) {
      std::string token = "SYN_" + table.categorical_names[j] + "_" + std::to_string(i);
      while (seen.count(token)) token += "_";
      seen.insert(token);
      pool.categorical[j].push_back(std::move(token));
    }
  }
  return pool;
}

std::size_t default_anomaly_count(std::size_t rows, double fraction) {
  if (fraction <= 0.0 || rows < 2) return 0;
  // at least one per class so tiny activities still score
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows)));
  return std::clamp<std::size_t>(k, 1, rows / 2);
}

void inject_global(data::EncodedBatch& activity, std::size_t k, const data::DatasetSchema& schema,
                   const AnomalyPool& pool, Rng& rng) {
  check_batch(activity, schema);
  if (k == 0) return;
  const auto layout = schema.layout();
  if (pool.categorical.size() != schema.categorical.size())
    throw InjectionError("anomaly pool does not match the schema's categorical attributes");

  std::vector<std::size_t> token_attrs;  // attributes with at least one encodable token
  std::vector<std::vector<std::size_t>> tokens(schema.categorical.size());
  for (std::size_t j = 0; j < schema.categorical.size(); ++j) {
    for (const auto& tok : pool.categorical[j]) {
      const auto idx = schema.categorical[j].find(tok);
      if (!idx) throw EncodingError("pool value '" + tok + "' is not in the schema of '" + schema.categorical[j].name + "'");
      tokens[j].push_back(*idx);
    }
    if (!tokens[j].empty()) token_attrs.push_back(j);
  }
  const bool has_cat = !token_attrs.empty();
  const bool has_num = !layout.numerical.empty();
  if (!has_cat && !has_num) throw InjectionError("no attribute can carry a global anomaly");

  for (std::size_t r : pick_victims(clean_rows(activity), k, rng, "inject_global")) {
    auto row = activity.rows.row(r);
    // 0: categorical only, 1: numeric only, 2: both
    std::size_t mode = has_cat && has_num ? uniform_index(rng, 3) : (has_cat ? 0 : 1);
    if (mode != 1) {
      const std::size_t n_attr = token_attrs.size() >= 2 ? 1 + uniform_index(rng, 2) : 1;
      auto chosen = sample_without_replacement(rng, token_attrs.size(), n_attr);
      for (std::size_t c : chosen) {
        const std::size_t j = token_attrs[c];
        set_hot(row, layout.categorical[j], tokens[j][uniform_index(rng, tokens[j].size())]);
      }
    }
    if (mode != 0) {
      const std::size_t slot = layout.numerical[uniform_index(rng, layout.numerical.size())];
      double u = uniform(rng, pool.numeric_excess_min, pool.numeric_excess_max);
      while (u <= pool.numeric_excess_min) u = uniform(rng, pool.numeric_excess_min, pool.numeric_excess_max);
      row[slot] = 1.0 + u;
    }
    activity.labels[r] = data::AnomalyLabel::global;
  }
}

std::size_t inject_local(data::EncodedBatch& activity, std::size_t k, const data::DatasetSchema& schema, Rng& rng,
                         const LocalOptions& options) {
  check_batch(activity, schema);
  if (k == 0) return 0;
  const auto layout = schema.layout();
  const std::size_t J = schema.categorical.size();
  if (J < 2) throw InjectionError("local anomalies need two categorical attributes, schema has " + std::to_string(J));

  const auto candidates = clean_rows(activity);
  const auto victims = pick_victims(candidates, k, rng, "inject_local");
  // Statistics over the rows that stay clean; the whole clean set when the
  // victims take all of it.
  std::vector<std::size_t> clean;
  {
    std::vector<bool> hit(activity.size(), false);
    for (std::size_t r : victims) hit[r] = true;
    for (std::size_t r : candidates)
      if (!hit[r]) clean.push_back(r);
    if (clean.empty()) clean = candidates;
  }
  std::vector<std::vector<std::size_t>> value_of(clean.size(), std::vector<std::size_t>(J));
  std::vector<std::map<std::size_t, std::size_t>> freq(J);
  for (std::size_t c = 0; c < clean.size(); ++c)
    for (std::size_t j = 0; j < J; ++j) ++freq[j][value_of[c][j] = data::hot_index(layout, activity.rows.row(clean[c]), j)];
  std::map<std::pair<std::size_t, std::size_t>, std::map<std::pair<std::size_t, std::size_t>, std::size_t>> joint;
  auto joint_count = [&](std::size_t a, std::size_t b, std::size_t va, std::size_t vb) -> std::size_t {
    auto& table = joint[{a, b}];
    if (table.empty())
      for (const auto& v : value_of) ++table[{v[a], v[b]}];
    auto it = table.find({va, vb});
    return it == table.end() ? 0 : it->second;
  };
  auto common = [&](std::size_t j, std::size_t v) { return freq[j][v] >= options.f_min; };

  std::size_t relaxed = 0;
  for (std::size_t r : victims) {
    auto row = activity.rows.row(r);
    std::vector<std::size_t> current(J);
    for (std::size_t j = 0; j < J; ++j) current[j] = data::hot_index(layout, row, j);

    bool done = false;
    for (std::size_t attempt = 0; attempt < options.max_resample && !done; ++attempt) {
      auto pair = sample_without_replacement(rng, J, 2);
      std::size_t a = std::min(pair[0], pair[1]), b = std::max(pair[0], pair[1]);
      // values come from two donor rows, so they follow the clean frequencies
      const std::size_t va = value_of[uniform_index(rng, clean.size())][a];
      const std::size_t vb = value_of[uniform_index(rng, clean.size())][b];
      if (va == current[a] && vb == current[b]) continue;
      if (!common(a, va) || !common(b, vb) || joint_count(a, b, va, vb) != 0) continue;
      set_hot(row, layout.categorical[a], va);
      set_hot(row, layout.categorical[b], vb);
      done = true;
    }
    if (done) {
      activity.labels[r] = data::AnomalyLabel::local;
      continue;
    }

    // Relaxation: rarest pair among common values, or among any observed
    // values if some attribute has none common.
    struct Candidate {
      std::size_t a, b, va, vb;
    };
    std::vector<Candidate> best;
    std::size_t best_count = static_cast<std::size_t>(-1);
    bool best_common = false;
    for (std::size_t a = 0; a < J; ++a)
      for (std::size_t b = a + 1; b < J; ++b)
        for (const auto& [va, fa] : freq[a])
          for (const auto& [vb, fb] : freq[b]) {
            if (va == current[a] && vb == current[b]) continue;
            const bool is_common = common(a, va) && common(b, vb);
            if (best_common && !is_common) continue;
            const std::size_t n = joint_count(a, b, va, vb);
            if (is_common && !best_common) {
              best.clear();
              best_count = static_cast<std::size_t>(-1);
              best_common = true;
            }
            if (n < best_count) {
              best.clear();
              best_count = n;
            }
            if (n == best_count) best.push_back({a, b, va, vb});
          }
    if (best.empty()) {
      std::size_t flat = 0;
      while (flat < J && freq[flat].size() > 1) ++flat;
      const std::string name = schema.categorical[flat < J ? flat : 0].name;
      throw InjectionError("no alternative value combination exists; attribute '" + name + "' is single-valued");
    }
    const auto& pick = best[uniform_index(rng, best.size())];
    set_hot(row, layout.categorical[pick.a], pick.va);
    set_hot(row, layout.categorical[pick.b], pick.vb);
    activity.labels[r] = data::AnomalyLabel::local;
    if (!best_common || best_count > 0) ++relaxed;
  }
  return relaxed;
}

}  // namespace fedledger::anomaly
