#pragma once

#include <cstddef>
#include <vector>

#include "fedledger/data/dataset.hpp"
#include "fedledger/nn/matrix.hpp"
#include "fedledger/rng.hpp"

namespace fedledger::cl {

// Stratified rehearsal memory. Departments are kept in the order they were
// first seen; each holds at most its quota of encoded rows.
struct ReplayBuffer {
  std::size_t capacity = 1000;
  bool exclude_anomalies = false;
  std::vector<std::size_t> departments;             // dataset department index, first-seen order
  std::vector<nn::Matrix> rows;                     // parallel to departments
  std::vector<std::vector<data::AnomalyLabel>> labels;  // parallel to rows
  nn::Matrix flat;                                  // all rows, department order

  std::size_t size() const { return flat.rows; }
  std::size_t count(std::size_t department) const;
};

// floor(capacity / n) each, one extra for the first capacity % n.
std::vector<std::size_t> replay_quotas(std::size_t capacity, std::size_t n_departments);

// Adds the experience's departments, rebalances to the quotas: existing
// departments are down-sampled, new or under-filled ones are filled by
// uniform sampling without replacement from the experience rows.
void replay_update_buffer(ReplayBuffer& buffer, const data::EncodedBatch& experience, Rng& rng);

// The batch followed by min(batch rows, buffer size) buffered rows drawn
// uniformly without replacement.
nn::Matrix replay_augment(const nn::Matrix& batch, const ReplayBuffer& buffer, Rng& rng);

}  // namespace fedledger::cl
