#include <gtest/gtest.h>

#include "rsed/synth.hpp"

namespace rsed {
namespace {

int count_kind(const LabeledClip& lc, EventKind k) {
  int n = 0;
  for (const auto& e : lc.labels) n += e.kind == k;
  return n;
}

TEST(Synth, FourBreathsWithoutCasOrNoise) {
  SynthConfig cfg;
  cfg.participants = 1;
  cfg.clips_per_participant = 1;
  cfg.breath_rate_min = cfg.breath_rate_max = 16.0;  // 4 cycles in 15 s
  cfg.cas_probability = 0.0;
  cfg.noise_level = 0.0;
  const Corpus c = synth_corpus(cfg, 3);
  ASSERT_EQ(c.clips.size(), 1u);
  const auto& lc = c.clips[0];
  EXPECT_EQ(count_kind(lc, EventKind::I), 4);
  EXPECT_EQ(count_kind(lc, EventKind::E), 4);
  EXPECT_EQ(count_kind(lc, EventKind::C), 0);
  for (const auto& e : lc.labels) {
    EXPECT_GE(e.start_s, 0.0);
    EXPECT_LT(e.start_s, e.end_s);
    EXPECT_LE(e.end_s, kClipSeconds);
  }
  EXPECT_EQ(lc.clip.samples.size(), kClipSamples);
}

TEST(Synth, CertainCasGivesCasInEveryClip) {
  SynthConfig cfg;
  cfg.cas_probability = 1.0;
  const Corpus c = synth_corpus(cfg, 9);
  for (const auto& lc : c.clips) EXPECT_GE(count_kind(lc, EventKind::C), 1);
}

TEST(Synth, DeterministicUnderSeed) {
  SynthConfig cfg;
  const Corpus a = synth_corpus(cfg, 21);
  const Corpus b = synth_corpus(cfg, 21);
  ASSERT_EQ(a.clips.size(), b.clips.size());
  for (std::size_t i = 0; i < a.clips.size(); ++i) {
    EXPECT_EQ(a.clips[i].clip.id, b.clips[i].clip.id);
    EXPECT_EQ(a.clips[i].clip.samples, b.clips[i].clip.samples);
    EXPECT_EQ(a.clips[i].labels, b.clips[i].labels);
  }
  const Corpus d = synth_corpus(cfg, 22);
  EXPECT_NE(a.clips[0].clip.samples, d.clips[0].clip.samples);
}

TEST(Synth, ParticipantsAndDomainMix) {
  SynthConfig cfg;
  cfg.participants = 4;
  cfg.clips_per_participant = 3;
  cfg.tracheal_fraction = 0.5;
  const Corpus c = synth_corpus(cfg, 1);
  EXPECT_EQ(c.clips.size(), 12u);
  int tracheal = 0;
  for (const auto& lc : c.clips) tracheal += lc.clip.domain == Domain::tracheal;
  EXPECT_EQ(tracheal, 6);
}

TEST(Synth, InvalidRangesAreRejected) {
  SynthConfig cfg;
  cfg.breath_rate_min = 30;
  cfg.breath_rate_max = 20;
  EXPECT_THROW(synth_corpus(cfg, 0), PreconditionError);
  cfg = {};
  cfg.cas_probability = 1.5;
  EXPECT_THROW(synth_corpus(cfg, 0), PreconditionError);
  cfg = {};
  cfg.participants = 0;
  EXPECT_THROW(synth_corpus(cfg, 0), PreconditionError);
}

TEST(Synth, LabelsWithinClipAndCasInsideInhalation) {
  SynthConfig cfg;
  cfg.cas_probability = 0.7;
  const Corpus c = synth_corpus(cfg, 5);
  for (const auto& lc : c.clips) {
    for (const auto& e : lc.labels) {
      ASSERT_GE(e.start_s, 0.0);
      ASSERT_LE(e.end_s, kClipSeconds);
      if (e.kind != EventKind::C) continue;
      bool inside = false;
      for (const auto& i : lc.labels) {
        inside |= i.kind == EventKind::I && i.start_s <= e.start_s && e.end_s <= i.end_s;
      }
      EXPECT_TRUE(inside);
    }
  }
}

}  // namespace
}  // namespace rsed
