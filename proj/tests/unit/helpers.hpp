#pragma once

#include <vector>

#include "fedledger/nn/layout.hpp"
#include "fedledger/nn/matrix.hpp"
#include "fedledger/rng.hpp"

namespace testing_helpers {

// Two categorical attributes (widths 4 and 3) and three numerical slots: a
// 10-dimensional encoded row.
inline fedledger::nn::SegmentLayout small_layout() {
  fedledger::nn::SegmentLayout layout;
  layout.categorical = {{0, 4}, {4, 3}};
  layout.numerical = {7, 8, 9};
  layout.width = 10;
  return layout;
}

inline fedledger::nn::Matrix random_rows(const fedledger::nn::SegmentLayout& layout, std::size_t n,
                                         fedledger::Rng& rng) {
  fedledger::nn::Matrix m(n, layout.width);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& seg : layout.categorical) m(i, seg.offset + fedledger::uniform_index(rng, seg.width)) = 1.0;
    for (std::size_t k : layout.numerical) m(i, k) = fedledger::uniform01(rng);
  }
  return m;
}

}  // namespace testing_helpers
