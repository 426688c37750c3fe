#pragma once

#include <cstdint>
#include <string>

#include "rsed/corpus.hpp"

namespace rsed {

/// Frequency bands (Hz) that the generator paints each event kind into.
struct BandProfile {
  double inhale_lo = 250.0, inhale_hi = 480.0;
  double exhale_lo = 100.0, exhale_hi = 220.0;
  double cas_lo = 550.0, cas_hi = 750.0;  // chirp sweep range
};

/// Band profile shifted upward, used as the "other domain" in desk-scale runs.
BandProfile shifted_profile();

struct SynthConfig {
  std::string name = "synthetic";
  int participants = 6;
  int clips_per_participant = 4;
  double breath_rate_min = 14.0;  // breaths per minute
  double breath_rate_max = 22.0;
  double cas_probability = 0.3;   // per breath cycle
  double noise_level = 0.02;      // background std, full scale = 1
  double event_amplitude = 0.25;
  double tracheal_fraction = 0.0; // share of participants tagged tracheal
  BandProfile bands;

  void validate() const;
};

/// Synthetic labeled corpus: band-limited noise bursts for I and E, tonal
/// chirps for C (placed inside an inhalation), over white background noise.
/// Labels are exact ground truth. Bit-identical for identical (cfg, seed).
Corpus synth_corpus(const SynthConfig& cfg, uint64_t seed);

}  // namespace rsed
