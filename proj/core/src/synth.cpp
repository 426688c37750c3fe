#include "rsed/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace rsed {
namespace {

constexpr int kPartials = 16;

// Raised-cosine fade over the first and last 10% of an event.
double envelope(double u) {
  constexpr double edge = 0.1;
  if (u < edge) return 0.5 - 0.5 * std::cos(std::numbers::pi * u / edge);
  if (u > 1.0 - edge) return 0.5 - 0.5 * std::cos(std::numbers::pi * (1.0 - u) / edge);
  return 1.0;
}

std::size_t to_sample(double seconds) {
  return std::min(kClipSamples, static_cast<std::size_t>(std::lround(seconds * kSampleRate)));
}

void add_band_noise(std::vector<double>& x, double start_s, double end_s, double lo, double hi,
                    double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> freq(lo, hi);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  double f[kPartials];
  double ph[kPartials];
  for (int p = 0; p < kPartials; ++p) {
    f[p] = freq(rng);
    ph[p] = phase(rng);
  }
  const double gain = amplitude * std::sqrt(2.0 / kPartials);
  const std::size_t a = to_sample(start_s), b = to_sample(end_s);
  for (std::size_t n = a; n < b; ++n) {
    const double t = static_cast<double>(n) / kSampleRate;
    double s = 0.0;
    for (int p = 0; p < kPartials; ++p) s += std::sin(2.0 * std::numbers::pi * f[p] * t + ph[p]);
    x[n] += gain * envelope(static_cast<double>(n - a) / static_cast<double>(b - a)) * s;
  }
}

void add_chirp(std::vector<double>& x, double start_s, double end_s, double f0, double f1,
               double amplitude) {
  const std::size_t a = to_sample(start_s), b = to_sample(end_s);
  const double dur = static_cast<double>(b - a) / kSampleRate;
  for (std::size_t n = a; n < b; ++n) {
    const double t = static_cast<double>(n - a) / kSampleRate;
    const double phase = 2.0 * std::numbers::pi * (f0 * t + 0.5 * (f1 - f0) * t * t / dur);
    x[n] += amplitude * envelope(t / dur) * std::sin(phase);
  }
}

}  // namespace

BandProfile shifted_profile() {
  BandProfile p;
  p.inhale_lo = 700.0;
  p.inhale_hi = 950.0;
  p.exhale_lo = 1100.0;
  p.exhale_hi = 1350.0;
  p.cas_lo = 1500.0;
  p.cas_hi = 1750.0;
  return p;
}

void SynthConfig::validate() const {
  const auto band_ok = [](double lo, double hi) { return lo > 0.0 && lo < hi && hi < 2000.0; };
  if (participants < 1 || clips_per_participant < 1) {
    throw PreconditionError("synth: participants and clips_per_participant must be >= 1");
  }
  if (!(breath_rate_min >= 4.0 && breath_rate_min <= breath_rate_max && breath_rate_max <= 60.0)) {
    throw PreconditionError("synth: breath rate range must satisfy 4 <= min <= max <= 60");
  }
  if (!(cas_probability >= 0.0 && cas_probability <= 1.0)) {
    throw PreconditionError("synth: cas_probability must lie in [0, 1]");
  }
  if (!(noise_level >= 0.0 && event_amplitude > 0.0 && event_amplitude <= 1.0)) {
    throw PreconditionError("synth: noise_level >= 0 and 0 < event_amplitude <= 1 required");
  }
  if (!(tracheal_fraction >= 0.0 && tracheal_fraction <= 1.0)) {
    throw PreconditionError("synth: tracheal_fraction must lie in [0, 1]");
  }
  if (!band_ok(bands.inhale_lo, bands.inhale_hi) || !band_ok(bands.exhale_lo, bands.exhale_hi) ||
      !band_ok(bands.cas_lo, bands.cas_hi)) {
    throw PreconditionError("synth: bands must satisfy 0 < lo < hi < 2000 Hz");
  }
}

Corpus synth_corpus(const SynthConfig& cfg, uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int n_tracheal = static_cast<int>(std::lround(cfg.tracheal_fraction * cfg.participants));
  Corpus corpus;
  corpus.name = cfg.name;
  for (int p = 0; p < cfg.participants; ++p) {
    const std::string pid = cfg.name + "_p" + std::to_string(p);
    const Domain domain = p < n_tracheal ? Domain::tracheal : Domain::lung;
    for (int c = 0; c < cfg.clips_per_participant; ++c) {
      std::vector<double> x(kClipSamples);
      for (auto& v : x) v = cfg.noise_level * gauss(rng);

      std::vector<LabelEvent> labels;
      const double rate = between(cfg.breath_rate_min, cfg.breath_rate_max);
      const int cycles = std::max(1, static_cast<int>(std::floor(kClipSeconds * rate / 60.0)));
      const double period = kClipSeconds / cycles;
      for (int k = 0; k < cycles; ++k) {
        const double base = k * period;
        const double i_start = base + between(0.02, 0.08) * period;
        const double i_end = i_start + between(0.30, 0.36) * period;
        const double e_start = i_end + between(0.04, 0.08) * period;
        const double e_end = e_start + between(0.30, 0.36) * period;
        const double amp = cfg.event_amplitude;
        add_band_noise(x, i_start, i_end, cfg.bands.inhale_lo, cfg.bands.inhale_hi,
                       amp * between(0.7, 1.3), rng);
        add_band_noise(x, e_start, e_end, cfg.bands.exhale_lo, cfg.bands.exhale_hi,
                       amp * between(0.7, 1.3), rng);
        labels.push_back({EventKind::I, i_start, i_end});
        if (unit(rng) < cfg.cas_probability) {
          const double len = between(0.4, 0.8) * (i_end - i_start);
          const double c_start = i_start + between(0.0, 1.0) * (i_end - i_start - len);
          const double f0 = between(cfg.bands.cas_lo, cfg.bands.cas_hi);
          const double f1 = between(cfg.bands.cas_lo, cfg.bands.cas_hi);
          add_chirp(x, c_start, c_start + len, f0, f1, 0.6 * amp);
          labels.push_back({EventKind::C, c_start, c_start + len});
        }
        labels.push_back({EventKind::E, e_start, e_end});
      }
      std::stable_sort(labels.begin(), labels.end(), [](const LabelEvent& a, const LabelEvent& b) {
        return a.start_s < b.start_s;
      });

      LabeledClip lc;
      lc.clip.id = pid + "#" + std::to_string(c);
      lc.clip.participant_id = pid;
      lc.clip.domain = domain;
      lc.clip.clip_index = c;
      lc.clip.samples.resize(kClipSamples);
      for (std::size_t n = 0; n < kClipSamples; ++n) {
        const double v = std::clamp(x[n], -1.0, 1.0) * 32767.0;
        lc.clip.samples[n] = static_cast<int16_t>(std::lround(v));
      }
      lc.labels = std::move(labels);
      corpus.clips.push_back(std::move(lc));
    }
  }
  return corpus;
}

}  // namespace rsed
