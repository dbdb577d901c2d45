#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fedledger/data/schedule.hpp"

namespace fedledger::data {

struct ExperienceStream {
  std::size_t client = 0;
  int scenario = 1;
  // experiences[t][department] -> sampled entry ids; empty when inactive.
  std::vector<std::vector<std::vector<std::size_t>>> experiences;

  std::size_t experience_size(std::size_t t) const;

  friend bool operator==(const ExperienceStream&, const ExperienceStream&) = default;
};

// For every active (client, experience, department) cell draws rho entry ids
// of that department: without replacement when the department has at least
// rho entries, uniformly with replacement otherwise. Clients sample
// independently. Throws ConfigError naming the department when a scheduled
// department has no entries.
std::vector<ExperienceStream> build_experience_streams(
    const std::vector<std::vector<std::size_t>>& entries_by_department,
    const std::vector<std::string>& department_names, const ScenarioSchedule& schedule,
    std::size_t rho, std::uint64_t seed);

}  // namespace fedledger::data
