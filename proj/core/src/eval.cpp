#include "rsed/eval.hpp"

#include <algorithm>
#include <tuple>

namespace rsed {

BinaryVector rasterize_truth(std::span<const LabelEvent> labels, EventKind kind) {
  std::vector<Interval> spans;
  for (const auto& l : labels) {
    if (l.kind == kind) spans.push_back({l.start_s, l.end_s});
  }
  std::sort(spans.begin(), spans.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  std::vector<Interval> merged;
  for (const auto& s : spans) {
    if (!merged.empty() && s.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(s);
    }
  }

  std::vector<double> covered(kNumSegments, 0.0);
  for (const auto& m : merged) {
    const auto first = static_cast<std::size_t>(std::max(0.0, m.start / kSegmentSeconds - 1.0));
    for (std::size_t j = first; j < kNumSegments && segment_start(j) < m.end; ++j) {
      const double lo = std::max(m.start, segment_start(j));
      const double hi = std::min(m.end, segment_end(j));
      if (hi > lo) covered[j] += hi - lo;
    }
  }
  BinaryVector out(kNumSegments, 0);
  for (std::size_t j = 0; j < kNumSegments; ++j) {
    const double half = 0.5 * (segment_end(j) - segment_start(j));
    out[j] = covered[j] > half ? 1 : 0;
  }
  return out;
}

ConfusionCounts segment_confusion(std::span<const uint8_t> pred, std::span<const uint8_t> truth) {
  if (pred.size() != truth.size()) {
    throw PreconditionError("segment_confusion: length mismatch (" + std::to_string(pred.size()) +
                            " vs " + std::to_string(truth.size()) + ")");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0, t = truth[i] != 0;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace {
Ratio ratio(int64_t num, int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

Ratio f1_score(Ratio sensitivity, Ratio ppv) {
  if (!sensitivity || !ppv || *sensitivity + *ppv == 0.0) return std::nullopt;
  return 2.0 * (*sensitivity * *ppv) / (*sensitivity + *ppv);
}

MetricSet segment_metrics(const ConfusionCounts& c) {
  MetricSet m;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.sensitivity = ratio(c.tp, c.tp + c.fn);
  m.specificity = ratio(c.tn, c.tn + c.fp);
  m.ppv = ratio(c.tp, c.tp + c.fp);
  m.f1 = f1_score(m.sensitivity, m.ppv);
  return m;
}

Ratio roc_auc(std::span<const ScoredItem> items) {
  std::vector<ScoredItem> sorted(items.begin(), items.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredItem& a, const ScoredItem& b) { return a.score < b.score; });
  double pos_rank_sum = 0.0;
  double npos = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (sorted[k].positive) {
        pos_rank_sum += midrank;
        npos += 1.0;
      }
    }
    i = j;
  }
  const double nneg = static_cast<double>(sorted.size()) - npos;
  if (npos == 0.0 || nneg == 0.0) return std::nullopt;
  return (pos_rank_sum - npos * (npos + 1.0) / 2.0) / (npos * nneg);
}

double jaccard(const Interval& a, const Interval& b) {
  const double inter = std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double uni = a.length() + b.length() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

EventCounts match_events(std::span<const Interval> truth, std::span<const Interval> pred) {
  struct Candidate {
    double ji;
    std::size_t t, p;
  };
  std::vector<Candidate> cands;
  std::vector<bool> t_has(truth.size(), false), p_has(pred.size(), false);
  for (std::size_t t = 0; t < truth.size(); ++t) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const double ji = jaccard(truth[t], pred[p]);
      if (ji >= kMatchJaccard) {
        cands.push_back({ji, t, p});
        t_has[t] = true;
        p_has[p] = true;
      }
    }
  }
  std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
    return std::make_tuple(-a.ji, truth[a.t].start, pred[a.p].start, a.t, a.p) <
           std::make_tuple(-b.ji, truth[b.t].start, pred[b.p].start, b.t, b.p);
  });
  std::vector<bool> t_paired(truth.size(), false), p_paired(pred.size(), false);
  EventCounts c;
  for (const auto& cand : cands) {
    if (t_paired[cand.t] || p_paired[cand.p]) continue;
    t_paired[cand.t] = p_paired[cand.p] = true;
    ++c.tp;
  }
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (!t_has[t]) ++c.fn;
    else if (!t_paired[t]) ++c.unpaired_truth;
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!p_has[p]) ++c.fp;
    else if (!p_paired[p]) ++c.unpaired_pred;
  }
  return c;
}

EventCounts match_events(std::span<const LabelEvent> truth, std::span<const DetectedEvent> pred) {
  std::vector<Interval> t, p;
  t.reserve(truth.size());
  p.reserve(pred.size());
  for (const auto& e : truth) t.push_back({e.start_s, e.end_s});
  for (const auto& e : pred) p.push_back({e.start_s, e.end_s});
  return match_events(std::span<const Interval>(t), std::span<const Interval>(p));
}

EventMetrics event_metrics(const EventCounts& c) {
  EventMetrics m;
  m.ppv = ratio(c.tp, c.tp + c.fp);
  m.sensitivity = ratio(c.tp, c.tp + c.fn);
  m.f1 = f1_score(m.sensitivity, m.ppv);
  return m;
}

double weighted_dual_score(double score_a, double n_a, double score_b, double n_b) {
  if (!(n_a >= 0.0 && n_b >= 0.0 && n_a + n_b > 0.0)) {
    throw PreconditionError("weighted_dual_score: label counts must be >= 0 with a positive sum");
  }
  return (score_a * n_a + score_b * n_b) / (n_a + n_b);
}

}  // namespace rsed
