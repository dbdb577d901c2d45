#include "fedledger/eval/report.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>

#include <sstream>

#include "fedledger/data/csv.hpp"
#include "fedledger/errors.hpp"
#include "fedledger/eval/svg.hpp"
#include "json.hpp"

namespace fedledger::eval {

namespace {

const char* kHeader = "seed,t,fl,cl,arch,ap_global,ap_local,dept,mean_rec_error";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw DataError("metrics.csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::string series_name(const MetricsRecord& r) { return r.fl + "/" + r.cl + "/" + r.arch; }

// Mean over seeds per experience, in order of first appearance of the key.
struct Curves {
  std::vector<std::string> names;
  std::map<std::string, std::map<std::size_t, std::pair<double, std::size_t>>> acc;

  void add(const std::string& name, std::size_t t, double v) {
    if (!acc.count(name)) names.push_back(name);
    auto& a = acc[name][t];
    a.first += v;
    ++a.second;
  }
  std::vector<Series> series() const {
    std::vector<Series> out;
    for (const auto& n : names) {
      Series s{n, {}};
      for (const auto& [t, a] : acc.at(n)) s.points.emplace_back(static_cast<double>(t), a.first / static_cast<double>(a.second));
      out.push_back(std::move(s));
    }
    return out;
  }
};

std::string safe_name(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return s;
}

}  // namespace

std::string metrics_csv(std::span<const MetricsRecord> records) {
  std::ostringstream o;
  o << kHeader << "\n";
  for (const auto& r : records) {
    const std::string prefix = std::to_string(r.seed) + "," + std::to_string(r.t) + "," + field(r.fl) + "," +
                               field(r.cl) + "," + field(r.arch) + ",";
    for (const auto& d : r.departments)
      o << prefix << ",," << field(d.department) << "," << fmt(d.mean_rec_error) << "\n";
    o << prefix << opt(r.ap_global) << "," << opt(r.ap_local) << ",all," << fmt(r.mean_rec_error) << "\n";
  }
  return o.str();
}

std::vector<MetricsRecord> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> f;
  if (!data::read_csv_record(in, f)) throw DataError("metrics.csv is empty");
  std::string header;
  for (std::size_t i = 0; i < f.size(); ++i) header += (i ? "," : "") + f[i];
  if (header != kHeader) throw DataError("metrics.csv has an unexpected header: " + header);
  std::vector<MetricsRecord> out;
  MetricsRecord cur;
  std::size_t line = 1;
  while (data::read_csv_record(in, f)) {
    ++line;
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 9) throw DataError("metrics.csv line " + std::to_string(line) + ": expected 9 fields");
    cur.seed = static_cast<std::uint64_t>(parse_double(f[0], line));
    cur.t = static_cast<std::size_t>(parse_double(f[1], line));
    cur.fl = f[2];
    cur.cl = f[3];
    cur.arch = f[4];
    if (f[7] == "all") {
      cur.ap_global = f[5].empty() ? std::nullopt : std::optional<double>(parse_double(f[5], line));
      cur.ap_local = f[6].empty() ? std::nullopt : std::optional<double>(parse_double(f[6], line));
      cur.mean_rec_error = parse_double(f[8], line);
      out.push_back(std::move(cur));
      cur = MetricsRecord{};
    } else {
      cur.departments.push_back({f[7], parse_double(f[8], line), 0});
    }
  }
  return out;
}

std::string summary_json(const SummaryTable& table) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["dataset"] = table.dataset;
  j["scale"] = "percent";
  ordered_json rows = ordered_json::array();
  auto stat = [](const std::optional<Stat>& s) {
    if (!s) return ordered_json(nullptr);
    ordered_json o;
    o["mean"] = s->mean;
    o["std"] = s->std;
    o["seeds"] = s->seeds;
    return o;
  };
  for (const auto& r : table.rows) {
    ordered_json o;
    o["fl"] = r.fl;
    o["cl"] = r.cl;
    o["ap_global"] = stat(r.ap_global);
    o["ap_global_arch"] = r.arch_global;
    o["ap_local"] = stat(r.ap_local);
    o["ap_local_arch"] = r.arch_local;
    rows.push_back(std::move(o));
  }
  j["strategies"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::vector<std::pair<std::string, std::string>> render_plots(std::span<const MetricsRecord> records) {
  Curves ap_g, ap_l, err;
  std::vector<std::string> keys;
  std::map<std::string, Curves> by_dept;
  for (const auto& r : records) {
    const auto name = series_name(r);
    if (r.ap_global) ap_g.add(name, r.t, 100.0 * *r.ap_global);
    if (r.ap_local) ap_l.add(name, r.t, 100.0 * *r.ap_local);
    err.add(name, r.t, r.mean_rec_error);
    if (!by_dept.count(name)) keys.push_back(name);
    for (const auto& d : r.departments) by_dept[name].add(d.department, r.t, d.mean_rec_error);
  }
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("ap_global.svg", line_chart("Audit client AP (global anomalies)", "experience", "AP [%]", ap_g.series()));
  out.emplace_back("ap_local.svg", line_chart("Audit client AP (local anomalies)", "experience", "AP [%]", ap_l.series()));
  out.emplace_back("rec_error.svg", line_chart("Audit client mean reconstruction error", "experience", "L_rec", err.series()));
  for (const auto& k : keys)
    out.emplace_back("dept_error_" + safe_name(k) + ".svg",
                     line_chart("Reconstruction error per department, " + k, "experience", "L_rec", by_dept[k].series()));
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_plots(std::span<const MetricsRecord> records, const std::filesystem::path& out_dir) {
  for (const auto& [name, svg] : render_plots(records)) write_text(out_dir / name, svg);
}

void emit_reports(const SummaryTable& table, std::span<const MetricsRecord> records,
                  const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
  write_text(out_dir / "metrics.csv", metrics_csv(records));
  write_text(out_dir / "summary.json", summary_json(table));
  write_plots(records, out_dir);
}

}  // namespace fedledger::eval
