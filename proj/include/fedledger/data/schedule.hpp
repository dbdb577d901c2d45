#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fedledger::data {

// activity[client][experience][department]. Client 0 is the audit client.
struct ScenarioSchedule {
  int scenario = 1;
  double sparsity = 0.5;
  std::size_t clients = 0;
  std::size_t experiences = 0;
  std::size_t departments = 0;
  std::vector<std::uint8_t> active;

  bool at(std::size_t client, std::size_t experience, std::size_t department) const {
    return active[(client * experiences + experience) * departments + department] != 0;
  }
  void set(std::size_t client, std::size_t experience, std::size_t department, bool on) {
    active[(client * experiences + experience) * departments + department] = on ? 1 : 0;
  }
  std::size_t active_count(std::size_t client, std::size_t experience) const;
  // Whether the given client's row is sparse under this scenario.
  static bool sparse_row(int scenario, std::size_t client);

  friend bool operator==(const ScenarioSchedule&, const ScenarioSchedule&) = default;
};

// Sparse rows: every (experience, department) cell is active with
// probability p, then any experience left empty gets one uniformly chosen
// department. Constant rows are all-true.
//   scenario 1: audit client sparse, collaborators constant
//   scenario 2: audit client constant, collaborators sparse
//   scenario 3: every client sparse
ScenarioSchedule generate_schedule(int scenario, std::size_t n_clients, std::size_t n_experiences,
                                   std::size_t n_departments, double p, std::uint64_t seed);

// Explicit matrix from configuration: [client][experience][department].
ScenarioSchedule schedule_from_matrix(int scenario,
                                      const std::vector<std::vector<std::vector<bool>>>& matrix);

}  // namespace fedledger::data
