#include "fedledger/cl/replay.hpp"

#include <algorithm>

#include "fedledger/errors.hpp"

namespace fedledger::cl {

std::size_t ReplayBuffer::count(std::size_t department) const {
  for (std::size_t i = 0; i < departments.size(); ++i)
    if (departments[i] == department) return rows[i].rows;
  return 0;
}

std::vector<std::size_t> replay_quotas(std::size_t capacity, std::size_t n_departments) {
  std::vector<std::size_t> q(n_departments, n_departments ? capacity / n_departments : 0);
  for (std::size_t i = 0; i < n_departments && i < capacity % n_departments; ++i) ++q[i];
  return q;
}

void replay_update_buffer(ReplayBuffer& buffer, const data::EncodedBatch& experience, Rng& rng) {
  if (buffer.capacity == 0) return;
  if (experience.department.size() != experience.size() || experience.labels.size() != experience.size())
    throw ShapeError("replay_update_buffer: metadata does not match rows");
  if (buffer.size() > 0 && experience.size() > 0 && experience.rows.cols != buffer.flat.cols)
    throw ShapeError("replay_update_buffer: row width changed");

  // Candidate rows of this experience per department, first-seen order.
  std::vector<std::size_t> exp_depts;
  std::vector<std::vector<std::size_t>> candidates;
  for (std::size_t i = 0; i < experience.size(); ++i) {
    if (buffer.exclude_anomalies && experience.labels[i] != data::AnomalyLabel::none) continue;
    const std::size_t d = experience.department[i];
    auto it = std::find(exp_depts.begin(), exp_depts.end(), d);
    if (it == exp_depts.end()) {
      exp_depts.push_back(d);
      candidates.emplace_back();
      it = exp_depts.end() - 1;
    }
    candidates[static_cast<std::size_t>(it - exp_depts.begin())].push_back(i);
  }
  for (std::size_t d : exp_depts) {
    if (std::find(buffer.departments.begin(), buffer.departments.end(), d) == buffer.departments.end()) {
      buffer.departments.push_back(d);
      buffer.rows.emplace_back(0, experience.rows.cols);
      buffer.labels.emplace_back();
    }
  }

  const auto quotas = replay_quotas(buffer.capacity, buffer.departments.size());
  for (std::size_t b = 0; b < buffer.departments.size(); ++b) {
    auto& stored = buffer.rows[b];
    auto& stored_labels = buffer.labels[b];
    const std::size_t quota = quotas[b];
    if (stored.rows > quota) {
      auto keep = sample_without_replacement(rng, stored.rows, quota);
      std::sort(keep.begin(), keep.end());
      std::vector<data::AnomalyLabel> kept_labels;
      for (std::size_t i : keep) kept_labels.push_back(stored_labels[i]);
      stored = nn::gather_rows(stored, keep);
      stored_labels = std::move(kept_labels);
    } else if (stored.rows < quota) {
      auto it = std::find(exp_depts.begin(), exp_depts.end(), buffer.departments[b]);
      if (it == exp_depts.end()) continue;
      const auto& pool = candidates[static_cast<std::size_t>(it - exp_depts.begin())];
      for (std::size_t c : sample_without_replacement(rng, pool.size(), quota - stored.rows)) {
        stored.append_row(experience.rows.row(pool[c]));
        stored_labels.push_back(experience.labels[pool[c]]);
      }
    }
  }

  std::size_t total = 0;
  for (const auto& m : buffer.rows) total += m.rows;
  buffer.flat = nn::Matrix(0, experience.rows.cols);
  buffer.flat.data.reserve(total * experience.rows.cols);
  for (const auto& m : buffer.rows) {
    buffer.flat.data.insert(buffer.flat.data.end(), m.data.begin(), m.data.end());
    buffer.flat.rows += m.rows;
  }
}

nn::Matrix replay_augment(const nn::Matrix& batch, const ReplayBuffer& buffer, Rng& rng) {
  if (buffer.size() == 0) return batch;
  if (buffer.flat.cols != batch.cols) throw ShapeError("replay_augment: width mismatch");
  const auto picks = sample_without_replacement(rng, buffer.size(), std::min(batch.rows, buffer.size()));
  return nn::vstack(batch, nn::gather_rows(buffer.flat, picks));
}

}  // namespace fedledger::cl
