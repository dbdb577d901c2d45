#include "fedledger/data/streams.hpp"

#include "fedledger/errors.hpp"
#include "fedledger/rng.hpp"

namespace fedledger::data {

std::size_t ExperienceStream::experience_size(std::size_t t) const {
  std::size_t n = 0;
  for (const auto& ids : experiences.at(t)) n += ids.size();
  return n;
}

std::vector<ExperienceStream> build_experience_streams(
    const std::vector<std::vector<std::size_t>>& entries_by_department,
    const std::vector<std::string>& department_names, const ScenarioSchedule& schedule,
    std::size_t rho, std::uint64_t seed) {
  if (rho == 0) throw ConfigError("rho must be positive", "/rho");
  if (entries_by_department.size() != schedule.departments)
    throw ConfigError("schedule department count does not match the dataset");

  std::vector<ExperienceStream> streams(schedule.clients);
  for (std::size_t c = 0; c < schedule.clients; ++c) {
    auto& stream = streams[c];
    stream.client = c;
    stream.scenario = schedule.scenario;
    stream.experiences.assign(schedule.experiences, std::vector<std::vector<std::size_t>>(schedule.departments));
    for (std::size_t t = 0; t < schedule.experiences; ++t) {
      for (std::size_t d = 0; d < schedule.departments; ++d) {
        if (!schedule.at(c, t, d)) continue;
        const auto& pool = entries_by_department[d];
        if (pool.empty()) {
          const std::string name = d < department_names.size() ? department_names[d] : std::to_string(d);
          throw ConfigError("scheduled department '" + name + "' has no entries");
        }
        Rng rng = make_rng(seed, "stream", {c, t, d});
        auto& ids = stream.experiences[t][d];
        ids.reserve(rho);
        if (pool.size() >= rho) {
          for (std::size_t i : sample_without_replacement(rng, pool.size(), rho)) ids.push_back(pool[i]);
        } else {
          for (std::size_t i = 0; i < rho; ++i) ids.push_back(pool[uniform_index(rng, pool.size())]);
        }
      }
    }
  }
  return streams;
}

}  // namespace fedledger::data
