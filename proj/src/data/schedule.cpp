#include "fedledger/data/schedule.hpp"

#include "fedledger/errors.hpp"
#include "fedledger/rng.hpp"

namespace fedledger::data {

std::size_t ScenarioSchedule::active_count(std::size_t client, std::size_t experience) const {
  std::size_t n = 0;
  for (std::size_t d = 0; d < departments; ++d) n += at(client, experience, d);
  return n;
}

bool ScenarioSchedule::sparse_row(int scenario, std::size_t client) {
  switch (scenario) {
    case 1: return client == 0;
    case 2: return client != 0;
    default: return true;
  }
}

ScenarioSchedule generate_schedule(int scenario, std::size_t n_clients, std::size_t n_experiences,
                                   std::size_t n_departments, double p, std::uint64_t seed) {
  if (scenario < 1 || scenario > 3) throw ConfigError("scenario must be 1, 2 or 3", "/scenario");
  if (n_clients == 0) throw ConfigError("at least one client is required", "/M");
  if (n_experiences == 0 || n_departments == 0) throw ConfigError("schedule dimensions must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("sparsity probability must lie in (0, 1]", "/sparsity_p");

  ScenarioSchedule s;
  s.scenario = scenario;
  s.sparsity = p;
  s.clients = n_clients;
  s.experiences = n_experiences;
  s.departments = n_departments;
  s.active.assign(n_clients * n_experiences * n_departments, 1);
  for (std::size_t c = 0; c < n_clients; ++c) {
    if (!ScenarioSchedule::sparse_row(scenario, c)) continue;
    Rng rng = make_rng(seed, "schedule", {c});
    for (std::size_t t = 0; t < n_experiences; ++t) {
      for (std::size_t d = 0; d < n_departments; ++d) s.set(c, t, d, bernoulli(rng, p));
      if (s.active_count(c, t) == 0) s.set(c, t, uniform_index(rng, n_departments), true);
    }
  }
  return s;
}

ScenarioSchedule schedule_from_matrix(int scenario,
                                      const std::vector<std::vector<std::vector<bool>>>& matrix) {
  if (matrix.empty() || matrix[0].empty() || matrix[0][0].empty())
    throw ConfigError("explicit schedule must be a non-empty [client][experience][department] array", "/schedule");
  ScenarioSchedule s;
  s.scenario = scenario;
  s.sparsity = 0.0;
  s.clients = matrix.size();
  s.experiences = matrix[0].size();
  s.departments = matrix[0][0].size();
  s.active.assign(s.clients * s.experiences * s.departments, 0);
  for (std::size_t c = 0; c < s.clients; ++c) {
    if (matrix[c].size() != s.experiences) throw ConfigError("ragged schedule matrix", "/schedule/" + std::to_string(c));
    for (std::size_t t = 0; t < s.experiences; ++t) {
      if (matrix[c][t].size() != s.departments)
        throw ConfigError("ragged schedule matrix", "/schedule/" + std::to_string(c) + "/" + std::to_string(t));
      for (std::size_t d = 0; d < s.departments; ++d) s.set(c, t, d, matrix[c][t][d]);
    }
  }
  return s;
}

}  // namespace fedledger::data
