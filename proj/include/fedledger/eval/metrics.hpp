#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedledger/data/dataset.hpp"
#include "fedledger/nn/autoencoder.hpp"

namespace fedledger::eval {

struct ScoredRow {
  double error = 0.0;
  data::AnomalyLabel label = data::AnomalyLabel::none;
  std::size_t department = 0;
};

// Per-row reconstruction loss as the anomaly score. NumericError when a
// score is not finite.
std::vector<ScoredRow> score_rows(const nn::ParamVector& params, const nn::ArchitectureSpec& spec,
                                  const nn::SegmentLayout& layout, const data::EncodedBatch& batch,
                                  double theta_mix = nn::kDefaultThetaMix);

// Step-wise AP: sum over ranks i of (R_i - R_{i-1}) P_i, scores ranked
// descending with ties kept in input order. Empty when there is no
// positive.
std::optional<double> average_precision(std::span<const double> scores, const std::vector<bool>& positive);

// AP for one anomaly class. Rows of the other anomaly class are dropped
// from the pool unless other_as_negative is set.
std::optional<double> ap_per_class(std::span<const ScoredRow> rows, data::AnomalyLabel target,
                                   bool other_as_negative = false);

struct DepartmentError {
  std::string department;
  double mean_rec_error = 0.0;
  std::size_t rows = 0;  // not written to metrics.csv

  friend bool operator==(const DepartmentError&, const DepartmentError&) = default;
};

// Evaluation of the central model on the audit client after one experience.
struct MetricsRecord {
  std::uint64_t seed = 0;
  std::size_t t = 0;  // 1-based experience number
  std::string fl;
  std::string cl;
  std::string arch;
  std::optional<double> ap_global;
  std::optional<double> ap_local;
  double mean_rec_error = 0.0;
  std::vector<DepartmentError> departments;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct Stat {
  double mean = 0.0;  // percent
  double std = 0.0;   // population std across seeds, percent
  std::size_t seeds = 0;
};

struct SummaryRow {
  std::string fl;
  std::string cl;
  std::string arch_global;  // architecture the AP_global column was taken from
  std::string arch_local;
  std::optional<Stat> ap_global;
  std::optional<Stat> ap_local;
};

struct SummaryTable {
  std::string dataset;
  std::vector<SummaryRow> rows;  // first-appearance order of (fl, cl)
};

// Per (fl, cl): mean over experiences within each seed, then mean and
// population std across seeds, in percent rounded to 2 decimals. AP_global
// comes from the shallow records when present, AP_local from the deep ones.
SummaryTable summarize(std::span<const MetricsRecord> records, const std::string& dataset = {});

double round2(double x);

}  // namespace fedledger::eval
