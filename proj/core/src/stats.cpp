#include "rsed/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <vector>

namespace rsed {
namespace {

constexpr std::size_t kExactLimit = 10;

// Number of ways to pick m of the ranks 1..n with each attainable rank sum.
std::vector<double> rank_sum_counts(std::size_t m, std::size_t n) {
  const std::size_t max_sum = n * (n + 1) / 2;
  // ways[k][s]: subsets of size k with sum s, built rank by rank.
  std::vector<std::vector<double>> ways(m + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    for (std::size_t k = std::min(m, r); k >= 1; --k) {
      for (std::size_t s = max_sum; s >= r; --s) ways[k][s] += ways[k - 1][s - r];
    }
  }
  return ways[m];
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw PreconditionError("mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

Ratio sample_sd(std::span<const double> x) {
  if (x.size() < 2) return std::nullopt;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

RankSumResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw PreconditionError("rank-sum test needs two non-empty samples");
  const std::size_t nx = x.size(), ny = y.size(), n = nx + ny;
  std::vector<std::pair<double, bool>> pooled;  // (value, from x)
  pooled.reserve(n);
  for (double v : x) pooled.emplace_back(v, true);
  for (double v : y) pooled.emplace_back(v, false);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum_x = 0.0;
  double tie_term = 0.0;  // sum of (t^3 - t) over tie groups
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    if (j - i > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second) rank_sum_x += midrank;
    }
    i = j;
  }

  RankSumResult out;
  out.rank_sum = rank_sum_x;
  const double dx = static_cast<double>(nx), dy = static_cast<double>(ny), dn = static_cast<double>(n);
  if (std::min(nx, ny) <= kExactLimit && !ties) {
    // Null distribution of the smaller sample's rank sum.
    const bool x_small = nx <= ny;
    const std::size_t m = x_small ? nx : ny;
    const double w = x_small ? rank_sum_x : dn * (dn + 1.0) / 2.0 - rank_sum_x;
    const auto counts = rank_sum_counts(m, n);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    double lower = 0.0, upper = 0.0;
    const auto wi = static_cast<std::size_t>(std::lround(w));
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (s <= wi) lower += counts[s];
      if (s >= wi) upper += counts[s];
    }
    out.exact = true;
    out.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / total);
    return out;
  }

  const double mu = dx * (dn + 1.0) / 2.0;
  const double var = dx * dy / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var <= 0.0) {
    out.p_value = 1.0;
    return out;
  }
  const double diff = rank_sum_x - mu;
  const double z = std::max(0.0, std::abs(diff) - 0.5) / std::sqrt(var);
  out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

TTestResult t_test_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) throw PreconditionError("t-test needs at least two values per sample");
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  const double mx = mean(x), my = mean(y);
  double ssx = 0.0, ssy = 0.0;
  for (double v : x) ssx += (v - mx) * (v - mx);
  for (double v : y) ssy += (v - my) * (v - my);
  TTestResult out;
  out.df = nx + ny - 2.0;
  const double pooled = (ssx + ssy) / out.df;
  if (pooled <= 0.0) return out;
  out.t = (mx - my) / std::sqrt(pooled * (1.0 / nx + 1.0 / ny));
  const boost::math::students_t dist(out.df);
  out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t))));
  return out;
}

}  // namespace rsed
