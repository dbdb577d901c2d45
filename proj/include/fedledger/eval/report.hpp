#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fedledger/eval/metrics.hpp"

namespace fedledger::eval {

// Header: seed,t,fl,cl,arch,ap_global,ap_local,dept,mean_rec_error. Each
// record gives one row per department (AP fields empty) followed by one
// aggregate row with dept "all". Absent AP values are empty fields.
std::string metrics_csv(std::span<const MetricsRecord> records);
std::vector<MetricsRecord> parse_metrics_csv(const std::string& text);

std::string summary_json(const SummaryTable& table);

// File name -> SVG document.
std::vector<std::pair<std::string, std::string>> render_plots(std::span<const MetricsRecord> records);

// metrics.csv, summary.json and the plots under out_dir. DataError with the
// path on I/O failure.
void emit_reports(const SummaryTable& table, std::span<const MetricsRecord> records,
                  const std::filesystem::path& out_dir);
void write_plots(std::span<const MetricsRecord> records, const std::filesystem::path& out_dir);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace fedledger::eval
