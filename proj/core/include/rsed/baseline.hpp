#pragma once

#include <array>

#include "rsed/features.hpp"
#include "rsed/segments.hpp"

namespace rsed {

/// Untrained energy detector: which normalized band-energy column (0-3) each
/// task listens to, and the logistic squashing applied to its segment mean.
struct BaselineConfig {
  std::array<int, 3> band_for_task{1, 0, 2};  // I, E, C
  double gain = 2.0;
  double offset = 0.0;
};

/// p[j] = logistic(gain * mean(energy[2j], energy[2j+1]) + offset).
SegmentProbabilities baseline_detect(const FeatureTensor& f, EventKind task,
                                     const BaselineConfig& cfg = {});

}  // namespace rsed
