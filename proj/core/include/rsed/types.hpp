#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rsed {

// Pipeline constants, all defined at a 4 kHz sampling rate.
inline constexpr int kSampleRate = 4000;
inline constexpr std::size_t kClipSamples = 60000;  // 15 s
inline constexpr double kClipSeconds = 15.0;
inline constexpr std::size_t kFftSize = 256;
inline constexpr std::size_t kHopSize = 64;
inline constexpr std::size_t kNumBins = kFftSize / 2 + 1;                // 129
inline constexpr std::size_t kNumFrames = kClipSamples / kHopSize + 1;   // 938
inline constexpr std::size_t kNumSegments = (kNumFrames + 1) / 2;        // 469
inline constexpr double kBinHz = static_cast<double>(kSampleRate) / kFftSize;  // 15.625
inline constexpr double kSegmentSeconds = 2.0 * kHopSize / kSampleRate;         // 0.032

enum class EventKind { I, E, C };
enum class Domain { lung, tracheal };

inline constexpr EventKind kAllKinds[] = {EventKind::I, EventKind::E, EventKind::C};

char to_char(EventKind k);
std::string_view to_string(Domain d);
EventKind parse_kind(std::string_view token);
Domain parse_domain(std::string_view token);

/// Ratio that may be undefined (zero denominator). Never silently 0.
using Ratio = std::optional<double>;

/// Violated precondition or bad configuration. CLI exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data. CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rsed
