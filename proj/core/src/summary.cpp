#include "rsed/summary.hpp"

#include <set>

#include "rsed/stats.hpp"

namespace rsed {

CorpusSummary summarize_clips(std::string name, const std::vector<const LabeledClip*>& clips) {
  CorpusSummary s;
  s.name = std::move(name);
  s.clips = static_cast<int64_t>(clips.size());
  s.total_minutes = static_cast<double>(clips.size()) * kClipSeconds / 60.0;
  std::set<std::string> participants;
  for (const LabeledClip* lc : clips) {
    participants.insert(lc->clip.participant_id);
    for (const LabelEvent& e : lc->labels) {
      s.kinds[static_cast<std::size_t>(e.kind)].durations_s.push_back(e.end_s - e.start_s);
    }
  }
  s.participants = static_cast<int64_t>(participants.size());
  for (DurationStats& d : s.kinds) {
    d.count = static_cast<int64_t>(d.durations_s.size());
    double total = 0.0;
    for (double x : d.durations_s) total += x;
    d.total_minutes = total / 60.0;
    if (d.count > 0) d.mean_s = mean(d.durations_s);
    d.sd_s = sample_sd(d.durations_s);
  }
  return s;
}

CorpusSummary summarize_corpus(const Corpus& corpus) {
  std::vector<const LabeledClip*> clips;
  clips.reserve(corpus.clips.size());
  for (const auto& lc : corpus.clips) clips.push_back(&lc);
  return summarize_clips(corpus.name, clips);
}

std::array<Ratio, 3> duration_p_values(const CorpusSummary& a, const CorpusSummary& b) {
  std::array<Ratio, 3> out;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& x = a.kinds[k].durations_s;
    const auto& y = b.kinds[k].durations_s;
    if (x.size() < 2 || y.size() < 2) continue;
    out[k] = t_test_two_sample(x, y).p_value;
  }
  return out;
}

Table summary_table(std::span<const CorpusSummary> summaries) {
  Table t;
  t.header = {"corpus", "participants", "clips", "minutes"};
  for (EventKind k : kAllKinds) {
    const std::string c(1, to_char(k));
    for (const char* col : {"_count", "_minutes", "_mean_s", "_sd_s"}) t.header.push_back(c + col);
  }
  for (const CorpusSummary& s : summaries) {
    std::vector<std::string> row{s.name, std::to_string(s.participants), std::to_string(s.clips),
                                 format_fixed(s.total_minutes, 2)};
    for (const DurationStats& d : s.kinds) {
      row.push_back(std::to_string(d.count));
      row.push_back(format_fixed(d.total_minutes, 2));
      row.push_back(format_ratio(d.mean_s, 2));
      row.push_back(format_ratio(d.sd_s, 2));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table duration_test_table(std::span<const CorpusSummary> summaries) {
  Table t;
  t.header = {"corpus_a", "corpus_b", "I_p", "E_p", "C_p"};
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    for (std::size_t j = i + 1; j < summaries.size(); ++j) {
      const auto p = duration_p_values(summaries[i], summaries[j]);
      t.rows.push_back({summaries[i].name, summaries[j].name, format_ratio(p[0], 6),
                        format_ratio(p[1], 6), format_ratio(p[2], 6)});
    }
  }
  return t;
}

}  // namespace rsed
