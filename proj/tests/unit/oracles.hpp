#pragma once

// Brute-force reference implementations used by the unit and acceptance suites.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "rsed/eval.hpp"

namespace rsed::oracle {

/// Largest number of one-to-one (truth, pred) pairs with JI >= 0.5, by
/// trying every assignment of each truth event to a free pred or to nothing.
inline int max_pairing(std::span<const Interval> truth, std::span<const Interval> pred) {
  std::vector<std::vector<bool>> ok(truth.size(), std::vector<bool>(pred.size()));
  for (std::size_t t = 0; t < truth.size(); ++t) {
    for (std::size_t p = 0; p < pred.size(); ++p) ok[t][p] = jaccard(truth[t], pred[p]) >= 0.5;
  }
  int best = 0;
  std::function<void(std::size_t, uint32_t, int)> go = [&](std::size_t t, uint32_t used, int count) {
    if (t == truth.size()) {
      best = std::max(best, count);
      return;
    }
    go(t + 1, used, count);
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (ok[t][p] && !(used & (1u << p))) go(t + 1, used | (1u << p), count + 1);
    }
  };
  go(0, 0, 0);
  return best;
}

/// Area under the empirical ROC curve by the trapezoid rule over distinct scores.
inline double trapezoid_auc(std::span<const ScoredItem> items) {
  std::vector<ScoredItem> s(items.begin(), items.end());
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  double pos = 0, neg = 0;
  for (const auto& i : s) (i.positive ? pos : neg) += 1.0;
  double tp = 0, fp = 0, prev_tpr = 0, prev_fpr = 0, area = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    for (; j < s.size() && s[j].score == s[i].score; ++j) (s[j].positive ? tp : fp) += 1.0;
    const double tpr = tp / pos, fpr = fp / neg;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    prev_tpr = tpr;
    prev_fpr = fpr;
    i = j;
  }
  return area;
}

/// Two-sided exact rank-sum p for tie-free samples, enumerating every way
/// of drawing |x| ranks out of |x| + |y|.
inline double rank_sum_enumeration_p(std::span<const double> x, std::span<const double> y) {
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::sort(pooled.begin(), pooled.end());
  int observed = 0;
  for (double v : x) {
    observed += static_cast<int>(std::lower_bound(pooled.begin(), pooled.end(), v) - pooled.begin()) + 1;
  }
  const int n = static_cast<int>(pooled.size());
  const int m = static_cast<int>(x.size());
  double le = 0, ge = 0, total = 0;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != m) continue;
    int sum = 0;
    for (int r = 0; r < n; ++r) {
      if (mask & (1u << r)) sum += r + 1;
    }
    total += 1;
    if (sum <= observed) le += 1;
    if (sum >= observed) ge += 1;
  }
  return std::min(1.0, 2.0 * std::min(le, ge) / total);
}

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x)) / a;
  const double tiny = 1e-300;
  double f = 1.0, c = 1.0, d = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const int m = i / 2;
    double num;
    if (i == 0) {
      num = 1.0;
    } else if (i % 2 == 0) {
      num = (m * (b - m) * x) / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    } else {
      num = -((a + m) * (a + b + m) * x) / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    }
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    const double cd = c * d;
    f *= cd;
    if (std::abs(1.0 - cd) < 1e-15) break;
  }
  return front * (f - 1.0);
}

/// Two-sided Student t tail probability.
inline double t_two_sided_p(double t, double df) {
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

}  // namespace rsed::oracle
