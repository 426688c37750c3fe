#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rsed/corpus.hpp"
#include "rsed/report.hpp"

namespace rsed {

struct DurationStats {
  int64_t count = 0;
  double total_minutes = 0.0;
  Ratio mean_s;  // unset when count == 0
  Ratio sd_s;    // sample sd; unset when count < 2
  std::vector<double> durations_s;
};

struct CorpusSummary {
  std::string name;
  int64_t clips = 0;
  int64_t participants = 0;
  double total_minutes = 0.0;
  std::array<DurationStats, 3> kinds;  // indexed by EventKind

  const DurationStats& of(EventKind k) const { return kinds[static_cast<std::size_t>(k)]; }
};

CorpusSummary summarize_corpus(const Corpus& corpus);
CorpusSummary summarize_clips(std::string name, const std::vector<const LabeledClip*>& clips);

/// Per-kind two-sided t-test p between duration samples; unset when either
/// side has fewer than two labels or the pooled variance is zero.
std::array<Ratio, 3> duration_p_values(const CorpusSummary& a, const CorpusSummary& b);

/// One row per corpus: clips, minutes, then count / minutes / mean ± sd per kind.
Table summary_table(std::span<const CorpusSummary> summaries);
/// One row per unordered pair of summaries with the three per-kind p-values.
Table duration_test_table(std::span<const CorpusSummary> summaries);

}  // namespace rsed
