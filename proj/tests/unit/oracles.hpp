#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// Central finite differences of f around x.
inline std::vector<double> central_differences(const std::function<double(const std::vector<double>&)>& f,
                                               std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = f(x);
    x[i] = orig - h;
    const double fm = f(x);
    x[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Average precision by direct enumeration: for every cut position i of the
// ranking (descending score, ties in input order) count TP and FP from
// scratch and accumulate (R_i - R_{i-1}) * P_i.
inline double brute_force_ap(const std::vector<double>& scores, const std::vector<bool>& positive) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[i] = i;
  // insertion sort: stable, descending
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = i; j > 0 && scores[rank[j - 1]] < scores[rank[j]]; --j) std::swap(rank[j - 1], rank[j]);
  std::size_t n_pos = 0;
  for (bool p : positive) n_pos += p;
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t tp = 0, fp = 0;
    for (std::size_t k = 0; k < i; ++k) (positive[rank[k]] ? tp : fp)++;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

}  // namespace oracles
