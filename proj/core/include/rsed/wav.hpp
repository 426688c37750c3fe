#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace rsed {

/// Raw contents of a RIFF/WAVE PCM file.
struct WavData {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  std::vector<int16_t> samples;  // interleaved; only filled for 16-bit PCM
};

/// Parses a PCM WAV file. Throws DataError("malformed WAV ...") on any
/// structural problem. Non-16-bit data is reported through bits_per_sample
/// with an empty sample vector.
WavData read_wav(const std::filesystem::path& path);

/// Writes mono 16-bit little-endian PCM.
void write_wav(const std::filesystem::path& path, std::span<const int16_t> samples,
               int sample_rate);

}  // namespace rsed
