#pragma once

#include <span>

#include "rsed/types.hpp"

namespace rsed {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1); unset for fewer than two values.
Ratio sample_sd(std::span<const double> x);

struct RankSumResult {
  double rank_sum = 0.0;  // of the first sample
  double p_value = 1.0;
  bool exact = false;
};

/// Two-sided Wilcoxon rank-sum test. Exact null distribution when the smaller
/// sample has at most 10 values and there are no ties; otherwise the normal
/// approximation with tie-corrected variance and a 0.5 continuity correction.
RankSumResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  Ratio p_value;  // unset when the pooled variance is zero
};

/// Two-sided pooled-variance Student's t-test. Requires |x|, |y| >= 2.
TTestResult t_test_two_sample(std::span<const double> x, std::span<const double> y);

}  // namespace rsed
