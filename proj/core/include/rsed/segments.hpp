#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "rsed/types.hpp"

namespace rsed {

/// Per-segment event probabilities for one task, 469 entries for a clip.
struct SegmentProbabilities {
  EventKind task = EventKind::I;
  std::vector<double> p;
};

using BinaryVector = std::vector<uint8_t>;

// Segment grid: segment j spans two STFT hops (32 ms); the last one is
// clipped to the 15 s clip end.
inline double segment_start(std::size_t j) { return static_cast<double>(j) * kSegmentSeconds; }
inline double segment_end(std::size_t j) {
  return std::min(static_cast<double>(j + 1) * kSegmentSeconds, kClipSeconds);
}

}  // namespace rsed
