#include "fedledger/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedledger/errors.hpp"

namespace fedledger::eval {

std::vector<ScoredRow> score_rows(const nn::ParamVector& params, const nn::ArchitectureSpec& spec,
                                  const nn::SegmentLayout& layout, const data::EncodedBatch& batch,
                                  double theta_mix) {
  if (batch.labels.size() != batch.size() || batch.department.size() != batch.size())
    throw ProtocolError("score_rows: batch carries no labels or departments");
  std::vector<ScoredRow> out;
  if (batch.size() == 0) return out;
  const auto losses = nn::row_losses(params, spec, batch.rows, layout, theta_mix);
  out.reserve(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!std::isfinite(losses[i].total)) throw NumericError("score_rows: non-finite reconstruction error");
    out.push_back({losses[i].total, batch.labels[i], batch.department[i]});
  }
  return out;
}

std::optional<double> average_precision(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw ShapeError("average_precision: score and label counts differ");
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw NumericError("average_precision: NaN score");
    n_pos += positive[i];
  }
  if (n_pos == 0) return std::nullopt;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t tp = 0, fp = 0;
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t idx : order) {
    (positive[idx] ? tp : fp)++;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

std::optional<double> ap_per_class(std::span<const ScoredRow> rows, data::AnomalyLabel target,
                                   bool other_as_negative) {
  if (target == data::AnomalyLabel::none) throw ConfigError("ap_per_class: target must be an anomaly class");
  std::vector<double> scores;
  std::vector<bool> positive;
  for (const auto& r : rows) {
    if (r.label != target && r.label != data::AnomalyLabel::none && !other_as_negative) continue;
    scores.push_back(r.error);
    positive.push_back(r.label == target);
  }
  return average_precision(scores, positive);
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

namespace {

std::optional<Stat> seed_stat(std::span<const MetricsRecord> records, const std::string& fl, const std::string& cl,
                              const std::string& arch, std::optional<double> MetricsRecord::*field) {
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<double, std::size_t>> acc;  // per seed: sum, count
  for (const auto& r : records) {
    if (r.fl != fl || r.cl != cl || r.arch != arch || !(r.*field)) continue;
    auto it = std::find(seeds.begin(), seeds.end(), r.seed);
    if (it == seeds.end()) {
      seeds.push_back(r.seed);
      acc.emplace_back(0.0, 0);
      it = seeds.end() - 1;
    }
    auto& a = acc[static_cast<std::size_t>(it - seeds.begin())];
    a.first += *(r.*field);
    ++a.second;
  }
  if (seeds.empty()) return std::nullopt;
  std::vector<double> means;
  for (const auto& [sum, n] : acc) means.push_back(sum / static_cast<double>(n));
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(means.size());
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(means.size());
  return Stat{round2(100.0 * mean), round2(100.0 * std::sqrt(var)), means.size()};
}

}  // namespace

SummaryTable summarize(std::span<const MetricsRecord> records, const std::string& dataset) {
  SummaryTable table;
  table.dataset = dataset;
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& r : records)
    if (std::find(pairs.begin(), pairs.end(), std::pair{r.fl, r.cl}) == pairs.end()) pairs.emplace_back(r.fl, r.cl);

  for (const auto& [fl, cl] : pairs) {
    std::vector<std::string> archs;
    for (const auto& r : records)
      if (r.fl == fl && r.cl == cl && std::find(archs.begin(), archs.end(), r.arch) == archs.end())
        archs.push_back(r.arch);
    auto pick = [&](const std::string& preferred) {
      return std::find(archs.begin(), archs.end(), preferred) != archs.end() ? preferred : archs.front();
    };
    SummaryRow row;
    row.fl = fl;
    row.cl = cl;
    row.arch_global = pick("shallow");
    row.arch_local = pick("deep");
    row.ap_global = seed_stat(records, fl, cl, row.arch_global, &MetricsRecord::ap_global);
    row.ap_local = seed_stat(records, fl, cl, row.arch_local, &MetricsRecord::ap_local);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace fedledger::eval
