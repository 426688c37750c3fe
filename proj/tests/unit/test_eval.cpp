#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rsed/eval.hpp"

namespace rsed {
namespace {

std::vector<Interval> lattice_events(std::mt19937_64& rng, int max_events) {
  std::uniform_int_distribution<int> count(0, max_events), step(0, 8), len(1, 10);
  std::vector<Interval> out;
  int pos = step(rng);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    const int l = len(rng);
    out.push_back({pos / 10.0, (pos + l) / 10.0});
    pos += l + step(rng);
  }
  return out;
}

TEST(Rasterize, HalfWidthRule) {
  const std::vector<LabelEvent> full{{EventKind::I, 0.0, 15.0}};
  const auto all = rasterize_truth(full, EventKind::I);
  ASSERT_EQ(all.size(), 469u);
  EXPECT_EQ(std::count(all.begin(), all.end(), 1), 469);
  const auto none = rasterize_truth(full, EventKind::E);
  EXPECT_EQ(std::count(none.begin(), none.end(), 1), 0);

  const std::vector<LabelEvent> half{{EventKind::C, 0.0, 0.016}};
  EXPECT_EQ(rasterize_truth(half, EventKind::C)[0], 0);
  const std::vector<LabelEvent> more{{EventKind::C, 0.0, 0.017}};
  EXPECT_EQ(rasterize_truth(more, EventKind::C)[0], 1);
}

TEST(Rasterize, UnionOfOverlappingLabelsCountsOnce) {
  // 8 ms and 10 ms labels overlapping on 4 ms: union 14 ms, not > half.
  const std::vector<LabelEvent> l{{EventKind::I, 0.032, 0.040}, {EventKind::I, 0.036, 0.046}};
  EXPECT_EQ(rasterize_truth(l, EventKind::I)[1], 0);
  // Two disjoint pieces adding to 20 ms do count.
  const std::vector<LabelEvent> m{{EventKind::I, 0.032, 0.042}, {EventKind::I, 0.054, 0.064}};
  EXPECT_EQ(rasterize_truth(m, EventKind::I)[1], 1);
}

TEST(Rasterize, EverySetSegmentHasMoreThanHalfCoverage) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 15.0), len(0.005, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LabelEvent> labels;
    for (int i = 0; i < 8; ++i) {
      const double s = u(rng);
      labels.push_back({EventKind::E, s, std::min(15.0, s + len(rng))});
    }
    const auto b = rasterize_truth(labels, EventKind::E);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double lo = segment_start(j), hi = segment_end(j);
      std::vector<Interval> pieces;
      for (const auto& l : labels) {
        if (std::min(hi, l.end_s) > std::max(lo, l.start_s)) {
          pieces.push_back({std::max(lo, l.start_s), std::min(hi, l.end_s)});
        }
      }
      std::sort(pieces.begin(), pieces.end(),
                [](const Interval& a, const Interval& c) { return a.start < c.start; });
      double covered = 0.0, reach = lo;
      for (const auto& piece : pieces) {
        covered += std::max(0.0, piece.end - std::max(reach, piece.start));
        reach = std::max(reach, piece.end);
      }
      const double half = 0.5 * (hi - lo);
      if (covered > half + 1e-12) EXPECT_EQ(b[j], 1) << j;
      if (covered < half - 1e-12) EXPECT_EQ(b[j], 0) << j;
    }
  }
}

TEST(Confusion, Tallies) {
  const BinaryVector ones(469, 1), zeros(469, 0);
  const auto all = segment_confusion(ones, ones);
  EXPECT_EQ(all.tp, 469);
  EXPECT_EQ(all.total(), 469);
  const auto inv = segment_confusion(ones, zeros);
  EXPECT_EQ(inv.tp, 0);
  EXPECT_EQ(inv.tn, 0);
  const BinaryVector p{1, 1, 0, 0}, t{1, 0, 1, 0};
  EXPECT_EQ(segment_confusion(p, t), (ConfusionCounts{1, 1, 1, 1}));
  EXPECT_THROW(segment_confusion(p, ones), PreconditionError);
}

TEST(SegmentMetrics, HandTally) {
  const auto m = segment_metrics({8, 88, 2, 2});
  EXPECT_DOUBLE_EQ(*m.ppv, 0.8);
  EXPECT_DOUBLE_EQ(*m.sensitivity, 0.8);
  EXPECT_NEAR(*m.f1, 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(*m.accuracy, 0.96);
  EXPECT_DOUBLE_EQ(*m.specificity, 88.0 / 90.0);
  EXPECT_FALSE(m.auc);
}

TEST(SegmentMetrics, ZeroDenominatorsAreUnset) {
  const auto m = segment_metrics({0, 10, 0, 0});
  EXPECT_FALSE(m.sensitivity);
  EXPECT_FALSE(m.ppv);
  EXPECT_FALSE(m.f1);
  EXPECT_DOUBLE_EQ(*m.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(*m.specificity, 1.0);
}

TEST(SegmentMetrics, AccuracyDecomposesExactly) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int64_t> c(1, 500);
  for (int i = 0; i < 1000; ++i) {
    const ConfusionCounts k{c(rng), c(rng), c(rng), c(rng)};
    const auto m = segment_metrics(k);
    const double P = static_cast<double>(k.tp + k.fn), N = static_cast<double>(k.tn + k.fp);
    EXPECT_NEAR(*m.accuracy, (*m.sensitivity * P + *m.specificity * N) / (P + N), 1e-15);
    for (const Ratio& r : {m.accuracy, m.sensitivity, m.specificity, m.ppv, m.f1}) {
      EXPECT_GE(*r, 0.0);
      EXPECT_LE(*r, 1.0);
    }
    EXPECT_NEAR(*m.f1, 2.0 * *m.sensitivity * *m.ppv / (*m.sensitivity + *m.ppv), 1e-15);
  }
}

TEST(F1, FixedPointAndUnset) {
  EXPECT_DOUBLE_EQ(*f1_score(0.37, 0.37), 0.37);
  EXPECT_FALSE(f1_score(0.0, 0.0));
  EXPECT_FALSE(f1_score(std::nullopt, 0.5));
}

TEST(Auc, Examples) {
  const std::vector<ScoredItem> separated{{0.9, true}, {0.8, true}, {0.2, false}};
  EXPECT_DOUBLE_EQ(*roc_auc(separated), 1.0);
  const std::vector<ScoredItem> ties{{0.5, true}, {0.5, false}, {0.5, true}};
  EXPECT_DOUBLE_EQ(*roc_auc(ties), 0.5);
  const std::vector<ScoredItem> mixed{{0.9, true}, {0.4, true}, {0.6, false}, {0.1, false}};
  EXPECT_DOUBLE_EQ(*roc_auc(mixed), 0.75);
  const std::vector<ScoredItem> one_class{{0.9, true}, {0.4, true}};
  EXPECT_FALSE(roc_auc(one_class));
  EXPECT_FALSE(roc_auc({}));
}

TEST(Auc, MatchesTrapezoidalRoc) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> level(0, 20);
  std::bernoulli_distribution pos(0.4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredItem> items(50 + trial);
    for (auto& i : items) i = {level(rng) / 20.0, pos(rng)};
    items[0].positive = true;
    items[1].positive = false;
    EXPECT_NEAR(*roc_auc(items), oracle::trapezoid_auc(items), 1e-12);
  }
}

TEST(Jaccard, Examples) {
  EXPECT_DOUBLE_EQ(jaccard({1, 2}, {1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(jaccard({0, 1}, {2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(jaccard({0, 2}, {1, 3}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(jaccard({0, 1}, {1, 2}), 0.0);
}

TEST(Jaccard, SymmetricBoundedAndIdentity) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> u(0, 20);
  for (int i = 0; i < 2000; ++i) {
    int a0 = u(rng), a1 = u(rng), b0 = u(rng), b1 = u(rng);
    if (a0 == a1 || b0 == b1) continue;
    const Interval a{std::min(a0, a1) / 10.0, std::max(a0, a1) / 10.0};
    const Interval b{std::min(b0, b1) / 10.0, std::max(b0, b1) / 10.0};
    const double j = jaccard(a, b);
    EXPECT_DOUBLE_EQ(j, jaccard(b, a));
    EXPECT_GE(j, 0.0);
    EXPECT_LE(j, 1.0);
    EXPECT_EQ(j == 1.0, a.start == b.start && a.end == b.end);
  }
}

TEST(Matching, Examples) {
  const std::vector<Interval> three{{0, 1}, {2, 3}, {4, 5}};
  EXPECT_EQ(match_events(three, three), (EventCounts{3, 0, 0, 0, 0}));
  const std::vector<Interval> t{{0, 1}}, p{{2, 3}};
  EXPECT_EQ(match_events(t, p), (EventCounts{0, 1, 1, 0, 0}));
}

TEST(Matching, ManyToOneExcludesLoserFromErrors) {
  // One truth, two preds each with JI exactly 0.5: one pair, one matched-but-unpaired pred.
  const std::vector<Interval> t{{0, 2}}, p{{0, 1}, {1, 2}};
  const auto c = match_events(t, p);
  EXPECT_EQ(c.tp, 1);
  EXPECT_EQ(c.fp, 0);
  EXPECT_EQ(c.fn, 0);
  EXPECT_EQ(c.unpaired_pred, 1);
}

TEST(Matching, LabelOverloadAgrees) {
  const std::vector<LabelEvent> t{{EventKind::C, 1.0, 2.0}};
  const std::vector<DetectedEvent> p{{EventKind::C, 1.1, 2.0, 0.0}, {EventKind::C, 5.0, 6.0, 0.0}};
  EXPECT_EQ(match_events(t, p), (EventCounts{1, 1, 0, 0, 0}));
}

TEST(Matching, AgreesWithExhaustivePairing) {
  std::mt19937_64 rng(5);
  int disagreements = 0;
  const int trials = 3000;
  for (int i = 0; i < trials; ++i) {
    const auto t = lattice_events(rng, 6);
    const auto p = lattice_events(rng, 6);
    const auto c = match_events(t, p);
    const int best = oracle::max_pairing(t, p);
    EXPECT_LE(c.tp, best);
    disagreements += c.tp != best;
    EXPECT_LE(c.tp, static_cast<int64_t>(std::min(t.size(), p.size())));
    EXPECT_LE(c.tp + c.fn, static_cast<int64_t>(t.size()));
    EXPECT_LE(c.tp + c.fp, static_cast<int64_t>(p.size()));
    EXPECT_EQ(c.tp + c.fn + c.unpaired_truth, static_cast<int64_t>(t.size()));
    EXPECT_EQ(c.tp + c.fp + c.unpaired_pred, static_cast<int64_t>(p.size()));
  }
  EXPECT_LT(disagreements, trials / 100);
}

TEST(EventMetrics, Examples) {
  auto m = event_metrics({1, 0, 0});
  EXPECT_DOUBLE_EQ(*m.ppv, 1.0);
  EXPECT_DOUBLE_EQ(*m.sensitivity, 1.0);
  EXPECT_DOUBLE_EQ(*m.f1, 1.0);
  m = event_metrics({0, 3, 2});
  EXPECT_DOUBLE_EQ(*m.ppv, 0.0);
  EXPECT_DOUBLE_EQ(*m.sensitivity, 0.0);
  EXPECT_FALSE(m.f1);
  m = event_metrics({8, 2, 2});
  EXPECT_DOUBLE_EQ(*m.ppv, 0.8);
  EXPECT_DOUBLE_EQ(*m.sensitivity, 0.8);
  EXPECT_NEAR(*m.f1, 0.8, 1e-15);
  EXPECT_FALSE(event_metrics({0, 0, 0}).ppv);
}

TEST(DualScore, Examples) {
  EXPECT_NEAR(weighted_dual_score(0.850, 10316, 0.615, 3784), 0.787, 5e-4);
  EXPECT_NEAR(weighted_dual_score(0.855, 10316, 0.793, 3784), 0.838, 5e-4);
  EXPECT_DOUBLE_EQ(weighted_dual_score(0.4, 3, 0.4, 1000), 0.4);
  EXPECT_THROW(weighted_dual_score(0.4, 0, 0.5, 0), PreconditionError);
}

TEST(DualScore, ConvexCombination) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0), n(0.0, 1e4);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    const double w = weighted_dual_score(a, n(rng) + 1, b, n(rng));
    EXPECT_GE(w, std::min(a, b) - 1e-15);
    EXPECT_LE(w, std::max(a, b) + 1e-15);
  }
}

}  // namespace
}  // namespace rsed
