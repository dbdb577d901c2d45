#pragma once

#include <cstddef>
#include <vector>

namespace fedledger::nn {

// Where each attribute lives inside an encoded row: one one-hot segment per
// categorical attribute and one slot per numerical attribute.
struct Segment {
  std::size_t offset = 0;
  std::size_t width = 0;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentLayout {
  std::vector<Segment> categorical;
  std::vector<std::size_t> numerical;
  std::size_t width = 0;

  friend bool operator==(const SegmentLayout&, const SegmentLayout&) = default;
};

}  // namespace fedledger::nn
