#pragma once

#include <span>
#include <vector>

namespace rsed {

/// Second-order section, normalized so a0 == 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Digital Butterworth high-pass of the given order, designed by bilinear
/// transform with the cutoff prewarped. Odd orders end in a first-order
/// section (b2 == a2 == 0).
std::vector<Biquad> butterworth_highpass(int order, double cutoff_hz, double sample_rate);

/// Magnitude of the cascade's frequency response at `freq_hz`.
double magnitude_response(std::span<const Biquad> sections, double freq_hz, double sample_rate);

/// Causal (forward-only) filtering through the cascade, zero initial state.
std::vector<double> filter_sos(std::span<const Biquad> sections, std::span<const double> x);

}  // namespace rsed
