#pragma once

#include <span>
#include <vector>

#include "rsed/eval.hpp"
#include "rsed/features.hpp"
#include "rsed/segments.hpp"

namespace rsed {

inline constexpr double kMergeGapSeconds = 0.5;   // strict: gap < 0.5 s
inline constexpr double kMergeFreqHz = 25.0;      // inclusive: |df| <= 25 Hz
inline constexpr double kBurstSeconds = 0.05;     // strict: duration < 0.05 s removed
inline constexpr int kThresholdSteps = 100;       // sweep 0.00, 0.01, ..., 1.00

/// One validation clip: predicted probabilities and its ground-truth segments.
struct ThresholdCase {
  std::span<const double> p;
  std::span<const uint8_t> truth;
};

/// Grid threshold maximizing pooled segment accuracy; ties go to the smallest.
double select_threshold(std::span<const ThresholdCase> cases);

/// out[j] = 1 iff p[j] >= threshold.
BinaryVector binarize(std::span<const double> p, double threshold);

/// One event per maximal run of ones. peak_freq_hz is left at 0.
std::vector<DetectedEvent> segments_to_events(std::span<const uint8_t> b, EventKind kind);

/// Bin of maximum linear power among frames whose centers fall in
/// [start_s, end_s); ties resolve to the lowest bin. -1 if no frame qualifies.
int peak_bin(const Spectrogram& spec, double start_s, double end_s);

/// Merges neighbours separated by < 0.5 s whose peak frequencies differ by
/// <= 25 Hz, repeating until no pair qualifies. Fills peak_freq_hz.
std::vector<DetectedEvent> merge_close_events(std::vector<DetectedEvent> events,
                                              const Spectrogram& spec);

std::vector<DetectedEvent> remove_bursts(std::vector<DetectedEvent> events);

/// binarize -> segments_to_events -> merge_close_events -> remove_bursts.
std::vector<DetectedEvent> postprocess(std::span<const double> p, double threshold,
                                       const Spectrogram& spec, EventKind kind);

/// Same text layout as label files.
void serialize_events(std::ostream& os, const std::vector<DetectedEvent>& events);

}  // namespace rsed
