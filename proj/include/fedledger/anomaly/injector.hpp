#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fedledger/anomaly/pool.hpp"
#include "fedledger/data/dataset.hpp"
#include "fedledger/data/schema.hpp"
#include "fedledger/data/table.hpp"
#include "fedledger/rng.hpp"

namespace fedledger::anomaly {

// `tokens_per_attribute` reserved values per categorical attribute of the
// table, bumped with a trailing '_' until they collide with nothing seen.
AnomalyPool make_pool(const data::RawTable& table, std::size_t tokens_per_attribute = 10);

struct LocalOptions {
  std::size_t f_min = 10;
  std::size_t max_resample = 100;
};

// Both injectors work on an activity already encoded against a schema that
// contains the pool, mutate k clean rows in place and label them. Rows that
// already carry a label are never picked again.

// Each picked row gets 1-2 categorical attributes replaced by pool tokens,
// a numeric slot pushed to 1 + u, or both. Throws ConfigError when k exceeds
// the clean rows.
void inject_global(data::EncodedBatch& activity, std::size_t k, const data::DatasetSchema& schema,
                   const AnomalyPool& pool, Rng& rng);

// Each picked row gets a pair of categorical attributes rewritten so that
// both values are common (>= f_min among the rows that stay clean) while
// the pair never co-occurs among them. After max_resample failed draws it
// falls back to the rarest achievable pair. Returns the number of rows whose
// pair misses the condition. Throws InjectionError when no other pair exists.
std::size_t inject_local(data::EncodedBatch& activity, std::size_t k, const data::DatasetSchema& schema, Rng& rng,
                  const LocalOptions& options = {});

// round(fraction * rows), at least one and at most half the rows; the
// reference protocol puts 20 of each class into 1,000 payments.
std::size_t default_anomaly_count(std::size_t rows, double fraction = 0.02);

}  // namespace fedledger::anomaly
