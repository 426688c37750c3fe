#include "rsed/baseline.hpp"

#include <cmath>

namespace rsed {

SegmentProbabilities baseline_detect(const FeatureTensor& f, EventKind task,
                                     const BaselineConfig& cfg) {
  const int band = cfg.band_for_task[static_cast<std::size_t>(task)];
  if (band < 0 || band >= kNumBands) throw PreconditionError("baseline band index out of range");
  if (f.x.cols() != static_cast<Eigen::Index>(kFeatureWidth)) {
    throw PreconditionError("baseline_detect expects a 193-column feature tensor");
  }
  const auto col = f.x.col(static_cast<Eigen::Index>(kEnergyColumn) + band);
  const Eigen::Index frames = f.x.rows();
  SegmentProbabilities out;
  out.task = task;
  out.p.resize(static_cast<std::size_t>((frames + 1) / 2));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(out.p.size()); ++j) {
    const double v = 2 * j + 1 < frames ? 0.5 * (col(2 * j) + col(2 * j + 1)) : col(2 * j);
    out.p[static_cast<std::size_t>(j)] = 1.0 / (1.0 + std::exp(-(cfg.gain * v + cfg.offset)));
  }
  return out;
}

}  // namespace rsed
