#include "rsed/butterworth.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "rsed/types.hpp"

namespace rsed {

std::vector<Biquad> butterworth_highpass(int order, double cutoff_hz, double sample_rate) {
  if (order < 1) throw PreconditionError("filter order must be >= 1");
  if (!(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0)) {
    throw PreconditionError("cutoff must lie in (0, fs/2)");
  }
  // Prewarped analog cutoff, expressed in the bilinear s = (1 - z^-1)/(1 + z^-1) domain.
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  std::vector<Biquad> sos;
  for (int i = 1; i <= order / 2; ++i) {
    // Conjugate pole pair of the analog prototype at angle (2i-1)pi/(2N) off the imaginary axis.
    const double q = 1.0 / (2.0 * std::sin((2.0 * i - 1.0) * std::numbers::pi / (2.0 * order)));
    const double norm = 1.0 / (1.0 + k / q + k * k);
    Biquad s;
    s.b0 = norm;
    s.b1 = -2.0 * norm;
    s.b2 = norm;
    s.a1 = 2.0 * (k * k - 1.0) * norm;
    s.a2 = (1.0 - k / q + k * k) * norm;
    sos.push_back(s);
  }
  if (order % 2 == 1) {
    Biquad s;
    s.b0 = 1.0 / (1.0 + k);
    s.b1 = -s.b0;
    s.a1 = (k - 1.0) / (k + 1.0);
    sos.push_back(s);
  }
  return sos;
}

double magnitude_response(std::span<const Biquad> sections, double freq_hz, double sample_rate) {
  const std::complex<double> zinv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate);
  std::complex<double> h = 1.0;
  for (const auto& s : sections) {
    h *= (s.b0 + zinv * (s.b1 + zinv * s.b2)) / (1.0 + zinv * (s.a1 + zinv * s.a2));
  }
  return std::abs(h);
}

std::vector<double> filter_sos(std::span<const Biquad> sections, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : sections) {
    // Transposed direct form II.
    double z1 = 0.0, z2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

}  // namespace rsed
