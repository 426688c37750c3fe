#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsed/corpus.hpp"
#include "rsed/segments.hpp"

namespace rsed {

struct Interval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

struct DetectedEvent {
  EventKind kind = EventKind::I;
  double start_s = 0.0;
  double end_s = 0.0;
  double peak_freq_hz = 0.0;
};

/// Ground-truth segment vector: segment j is 1 iff the union of `kind` labels
/// covers strictly more than half of the segment's span.
BinaryVector rasterize_truth(std::span<const LabelEvent> labels, EventKind kind);

struct ConfusionCounts {
  int64_t tp = 0, tn = 0, fp = 0, fn = 0;
  int64_t total() const { return tp + tn + fp + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp; tn += o.tn; fp += o.fp; fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts segment_confusion(std::span<const uint8_t> pred, std::span<const uint8_t> truth);

/// Segment-level indexes; an unset Ratio marks a zero denominator.
struct MetricSet {
  Ratio accuracy, sensitivity, specificity, ppv, f1, auc;
};

MetricSet segment_metrics(const ConfusionCounts& c);

struct ScoredItem {
  double score = 0.0;
  bool positive = false;
};

/// Probability that a random positive outscores a random negative (ties 1/2).
/// Unset when either class is absent.
Ratio roc_auc(std::span<const ScoredItem> items);

/// |a ∩ b| / |a ∪ b| with the union measured as a set, not as the hull.
double jaccard(const Interval& a, const Interval& b);

inline constexpr double kMatchJaccard = 0.5;

struct EventCounts {
  int64_t tp = 0, fp = 0, fn = 0;
  // Events that had a JI >= 0.5 partner but lost the one-to-one pairing.
  int64_t unpaired_truth = 0, unpaired_pred = 0;
  EventCounts& operator+=(const EventCounts& o) {
    tp += o.tp; fp += o.fp; fn += o.fn;
    unpaired_truth += o.unpaired_truth; unpaired_pred += o.unpaired_pred;
    return *this;
  }
  friend bool operator==(const EventCounts&, const EventCounts&) = default;
};

/// Bidirectional JI >= 0.5 matching with each (truth, pred) TP pair counted once.
/// Pairs are accepted greedily by descending JI (ties: earlier truth start,
/// then earlier pred start). fn/fp count only events with no JI >= 0.5 partner.
EventCounts match_events(std::span<const Interval> truth, std::span<const Interval> pred);
EventCounts match_events(std::span<const LabelEvent> truth, std::span<const DetectedEvent> pred);

struct EventMetrics {
  Ratio ppv, sensitivity, f1;
};

EventMetrics event_metrics(const EventCounts& c);

/// Label-count weighted mean of one index measured on two test sets.
double weighted_dual_score(double score_a, double n_a, double score_b, double n_b);

/// Harmonic mean of sensitivity and PPV; unset if either is unset or both are 0.
Ratio f1_score(Ratio sensitivity, Ratio ppv);

}  // namespace rsed
