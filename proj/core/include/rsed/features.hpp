#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rsed/corpus.hpp"
#include "rsed/types.hpp"

namespace rsed {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kHighpassOrder = 4;
inline constexpr double kHighpassCutoffHz = 80.0;
inline constexpr int kMelFilters = 40;
inline constexpr int kMfccCoefficients = 20;
inline constexpr int kNumBands = 4;
inline constexpr std::size_t kFeatureWidth = kNumBins + 3 * kMfccCoefficients + kNumBands;  // 193

/// Linear power spectrogram, frames x bins.
struct Spectrogram {
  Matrix power;
  std::vector<double> frame_times;  // frame centers, seconds
  std::vector<double> bin_freqs;    // bin centers, Hz
};

struct MfccSet {
  Matrix static_c;
  Matrix delta;
  Matrix accel;
};

struct Band {
  double lo_hz;
  double hi_hz;
};

/// 0-250, 250-500, 500-1000 Hz are half-open; the last band covers every bin.
inline constexpr std::array<Band, kNumBands> kEnergyBands{
    Band{0.0, 250.0}, Band{250.0, 500.0}, Band{500.0, 1000.0}, Band{0.0, 2000.0}};

struct BandEnergies {
  Matrix e;  // frames x 4
};

/// Column layout: [0,129) log-spectrogram, [129,189) static/delta/accel MFCC,
/// [189,193) band energies. Every group is z-scored independently.
struct FeatureTensor {
  Matrix x;
};

inline constexpr std::size_t kMfccColumn = kNumBins;
inline constexpr std::size_t kEnergyColumn = kNumBins + 3 * kMfccCoefficients;

/// Samples scaled to [-1, 1) and run through the 80 Hz order-4 Butterworth high-pass.
std::vector<double> highpass(std::span<const int16_t> samples);
std::vector<double> highpass(std::span<const double> signal);

/// Center-padded (128 zeros per side) periodic-Hann STFT, n = 256, hop = 64.
/// Input must be exactly 60000 samples; output is 938 x 129.
Spectrogram spectrogram(std::span<const double> signal);

MfccSet mfcc(const Spectrogram& spec);
BandEnergies band_energies(const Spectrogram& spec);
FeatureTensor assemble_features(const Spectrogram& spec, const MfccSet& mfccs,
                                const BandEnergies& energies);

/// Triangular mel filterbank, kMelFilters x kNumBins, spanning 0 to 2000 Hz.
const Matrix& mel_filterbank();

/// Regression delta over +/-2 frames with edge replication.
Matrix delta(const Matrix& m);

/// Whole chain: clip -> (linear spectrogram, feature tensor).
struct ClipFeatures {
  Spectrogram spec;
  FeatureTensor features;
};
ClipFeatures extract_features(const Clip& clip);

/// Float32 dump: u32 frames, u32 columns (little-endian), then row-major data.
void write_feature_dump(const std::filesystem::path& path, const FeatureTensor& f);
Matrix read_feature_dump(const std::filesystem::path& path);

}  // namespace rsed
