#include "fedledger/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedledger/errors.hpp"
#include "fedledger/rng.hpp"

namespace fedledger::data {

namespace {

std::size_t draw_categorical(Rng& rng, const std::vector<double>& probs) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

}  // namespace

SynthResult synthesize_dataset(const SynthSpec& spec) {
  if (spec.n_departments == 0 || spec.rows_per_department == 0 || spec.cardinality == 0 ||
      spec.prototypes == 0 || spec.n_categorical + spec.n_numerical == 0)
    throw ConfigError("synthesize_dataset: counts must be positive");

  Rng rng(derive_seed(spec.seed, "synthesize_dataset"));
  SynthResult result;
  RawTable& table = result.table;
  SynthParameters& params = result.parameters;
  table.department_attribute = "department";
  for (std::size_t j = 0; j < spec.n_categorical; ++j) table.categorical_names.push_back("attr_" + std::to_string(j));
  for (std::size_t k = 0; k < spec.n_numerical; ++k) table.numerical_names.push_back("amount_" + std::to_string(k));

  // Geometric skew over a department-specific ranking of the alphabet.
  std::vector<double> skew(spec.cardinality);
  double z = 0.0;
  for (std::size_t r = 0; r < spec.cardinality; ++r) z += skew[r] = std::pow(0.55, static_cast<double>(r));
  for (double& w : skew) w /= z;

  params.marginals.resize(spec.n_departments);
  params.prototypes.resize(spec.n_departments);
  params.prototype_weights.resize(spec.n_departments);
  params.numeric_centres.resize(spec.n_departments);
  for (std::size_t d = 0; d < spec.n_departments; ++d) {
    for (std::size_t j = 0; j < spec.n_categorical; ++j) {
      std::vector<std::size_t> ranking(spec.cardinality);
      for (std::size_t v = 0; v < spec.cardinality; ++v) ranking[v] = v;
      shuffle(ranking, rng);
      std::vector<double> probs(spec.cardinality);
      for (std::size_t r = 0; r < spec.cardinality; ++r) probs[ranking[r]] = skew[r];
      params.marginals[d].push_back(std::move(probs));
    }
    double wsum = 0.0;
    for (std::size_t p = 0; p < spec.prototypes; ++p) {
      std::vector<std::size_t> proto;
      for (std::size_t j = 0; j < spec.n_categorical; ++j)
        proto.push_back(draw_categorical(rng, params.marginals[d][j]));
      params.prototypes[d].push_back(std::move(proto));
      const double w = 1.0 + uniform01(rng);
      params.prototype_weights[d].push_back(w);
      wsum += w;
    }
    for (double& w : params.prototype_weights[d]) w /= wsum;
    for (std::size_t k = 0; k < spec.n_numerical; ++k) params.numeric_centres[d].push_back(uniform(rng, 100.0, 900.0));
  }

  table.entries.reserve(spec.n_departments * spec.rows_per_department);
  for (std::size_t d = 0; d < spec.n_departments; ++d) {
    const std::string dept = "dept_" + std::to_string(d);
    for (std::size_t i = 0; i < spec.rows_per_department; ++i) {
      Entry e;
      e.department = dept;
      const std::size_t p = draw_categorical(rng, params.prototype_weights[d]);
      for (std::size_t j = 0; j < spec.n_categorical; ++j) {
        std::size_t v = params.prototypes[d][p][j];
        if (!bernoulli(rng, spec.prototype_fidelity)) v = draw_categorical(rng, params.marginals[d][j]);
        e.categorical.push_back("v" + std::to_string(v));
      }
      for (std::size_t k = 0; k < spec.n_numerical; ++k) {
        const double offset = 40.0 * (static_cast<double>(p) - 0.5 * static_cast<double>(spec.prototypes - 1));
        const double amount = params.numeric_centres[d][k] + offset + normal(rng, 0.0, 15.0);
        e.numerical.push_back(std::round(std::max(0.0, amount) * 100.0) / 100.0);
      }
      table.entries.push_back(std::move(e));
    }
  }
  return result;
}

}  // namespace fedledger::data
