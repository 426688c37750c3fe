#include "rsed/postprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace rsed {

double select_threshold(std::span<const ThresholdCase> cases) {
  if (cases.empty()) throw PreconditionError("select_threshold needs at least one clip");
  // correct[i]: pooled correct segments at threshold i/100.
  std::vector<int64_t> correct(kThresholdSteps + 1, 0);
  for (const auto& c : cases) {
    if (c.p.size() != c.truth.size()) throw PreconditionError("select_threshold: length mismatch");
    for (std::size_t j = 0; j < c.p.size(); ++j) {
      for (int i = 0; i <= kThresholdSteps; ++i) {
        const bool pred = c.p[j] >= static_cast<double>(i) / kThresholdSteps;
        if (pred == (c.truth[j] != 0)) ++correct[static_cast<std::size_t>(i)];
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= kThresholdSteps; ++i) {
    if (correct[static_cast<std::size_t>(i)] > correct[static_cast<std::size_t>(best)]) best = i;
  }
  return static_cast<double>(best) / kThresholdSteps;
}

BinaryVector binarize(std::span<const double> p, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw PreconditionError("threshold must lie in [0, 1]");
  BinaryVector b(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) b[j] = p[j] >= threshold ? 1 : 0;
  return b;
}

std::vector<DetectedEvent> segments_to_events(std::span<const uint8_t> b, EventKind kind) {
  std::vector<DetectedEvent> events;
  std::size_t j = 0;
  while (j < b.size()) {
    if (!b[j]) {
      ++j;
      continue;
    }
    std::size_t k = j;
    while (k < b.size() && b[k]) ++k;
    events.push_back({kind, segment_start(j), segment_end(k - 1), 0.0});
    j = k;
  }
  return events;
}

int peak_bin(const Spectrogram& spec, double start_s, double end_s) {
  // Frame t is centered at t * hop / fs; index arithmetic avoids rounding at segment edges.
  constexpr double frame_s = static_cast<double>(kHopSize) / kSampleRate;
  const auto first_frame = [&](double s) {
    return static_cast<Eigen::Index>(std::max(0.0, std::ceil(s / frame_s - 1e-6)));
  };
  const Eigen::Index t0 = first_frame(start_s);
  const Eigen::Index t1 = std::min(first_frame(end_s), spec.power.rows());
  int best_bin = -1;
  double best = -1.0;
  for (Eigen::Index t = t0; t < t1; ++t) {
    for (Eigen::Index k = 0; k < spec.power.cols(); ++k) {
      if (spec.power(t, k) > best) {
        best = spec.power(t, k);
        best_bin = static_cast<int>(k);
      } else if (spec.power(t, k) == best && k < best_bin) {
        best_bin = static_cast<int>(k);
      }
    }
  }
  return best_bin;
}

namespace {
double peak_hz(const Spectrogram& spec, const DetectedEvent& e) {
  const int bin = peak_bin(spec, e.start_s, e.end_s);
  return bin < 0 ? 0.0 : static_cast<double>(bin) * kBinHz;
}
}  // namespace

std::vector<DetectedEvent> merge_close_events(std::vector<DetectedEvent> events,
                                              const Spectrogram& spec) {
  for (auto& e : events) e.peak_freq_hz = peak_hz(spec, e);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<DetectedEvent> next;
    next.reserve(events.size());
    for (const auto& e : events) {
      if (!next.empty()) {
        auto& last = next.back();
        const double gap = e.start_s - last.end_s;
        if (gap < kMergeGapSeconds && std::abs(e.peak_freq_hz - last.peak_freq_hz) <= kMergeFreqHz) {
          last.end_s = std::max(last.end_s, e.end_s);
          last.peak_freq_hz = peak_hz(spec, last);
          changed = true;
          continue;
        }
      }
      next.push_back(e);
    }
    events = std::move(next);
  }
  return events;
}

std::vector<DetectedEvent> remove_bursts(std::vector<DetectedEvent> events) {
  std::erase_if(events, [](const DetectedEvent& e) { return e.end_s - e.start_s < kBurstSeconds; });
  return events;
}

std::vector<DetectedEvent> postprocess(std::span<const double> p, double threshold,
                                       const Spectrogram& spec, EventKind kind) {
  const auto b = binarize(p, threshold);
  return remove_bursts(merge_close_events(segments_to_events(b, kind), spec));
}

void serialize_events(std::ostream& os, const std::vector<DetectedEvent>& events) {
  const auto fmt = [](double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
  };
  for (const auto& e : events) {
    os << to_char(e.kind) << ' ' << fmt(e.start_s) << ' ' << fmt(e.end_s) << '\n';
  }
}

}  // namespace rsed
