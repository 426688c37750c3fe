#include "rsed/features.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>

#include "rsed/butterworth.hpp"

namespace rsed {
namespace {

constexpr double kLogFloor = 1e-10;
constexpr double kNormEps = 1e-8;

// One plan shared by all threads; fftw_execute_dft_r2c on caller buffers is re-entrant.
class RealFft {
 public:
  RealFft() {
    std::lock_guard lock(planner_mutex());
    double* in = fftw_alloc_real(kFftSize);
    fftw_complex* out = fftw_alloc_complex(kNumBins);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(kFftSize), in, out,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  void run(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(plan_, in, out); }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }
  fftw_plan plan_;
};

const RealFft& fft() {
  static const RealFft instance;
  return instance;
}

const std::vector<double>& hann() {
  static const std::vector<double> w = [] {
    std::vector<double> v(kFftSize);
    for (std::size_t n = 0; n < kFftSize; ++n) {
      v[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / kFftSize);
    }
    return v;
  }();
  return w;
}

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Orthonormal DCT-II basis, rows = kept coefficients.
const Matrix& dct_basis() {
  static const Matrix d = [] {
    Matrix m(kMfccCoefficients, kMelFilters);
    for (int k = 0; k < kMfccCoefficients; ++k) {
      const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / kMelFilters);
      for (int n = 0; n < kMelFilters; ++n) {
        m(k, n) = scale * std::cos(std::numbers::pi * k * (2.0 * n + 1.0) / (2.0 * kMelFilters));
      }
    }
    return m;
  }();
  return d;
}

template <typename Block>
void zscore(Block&& b) {
  const double n = static_cast<double>(b.size());
  // Second pass removes the summation residue, so a constant group maps to exact zeros.
  double mean = b.sum() / n;
  mean += (b.array() - mean).sum() / n;
  const double var = (b.array() - mean).square().sum() / n;
  b = ((b.array() - mean) / (std::sqrt(var) + kNormEps)).matrix();
}

}  // namespace

std::vector<double> highpass(std::span<const double> signal) {
  static const auto sos = butterworth_highpass(kHighpassOrder, kHighpassCutoffHz, kSampleRate);
  return filter_sos(sos, signal);
}

std::vector<double> highpass(std::span<const int16_t> samples) {
  std::vector<double> x(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) x[i] = samples[i] / 32768.0;
  return highpass(std::span<const double>(x));
}

Spectrogram spectrogram(std::span<const double> signal) {
  if (signal.size() != kClipSamples) {
    throw PreconditionError("spectrogram expects 60000 samples, got " +
                            std::to_string(signal.size()));
  }
  constexpr std::size_t pad = kFftSize / 2;
  std::vector<double> padded(signal.size() + 2 * pad, 0.0);
  std::copy(signal.begin(), signal.end(), padded.begin() + pad);

  Spectrogram s;
  s.power.resize(kNumFrames, kNumBins);
  const auto& w = hann();
  std::vector<double> frame(kFftSize);
  std::vector<fftw_complex> out(kNumBins);
  for (std::size_t t = 0; t < kNumFrames; ++t) {
    const double* src = padded.data() + t * kHopSize;
    for (std::size_t n = 0; n < kFftSize; ++n) frame[n] = src[n] * w[n];
    fft().run(frame.data(), out.data());
    for (std::size_t k = 0; k < kNumBins; ++k) {
      s.power(t, k) = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    }
  }
  s.frame_times.resize(kNumFrames);
  for (std::size_t t = 0; t < kNumFrames; ++t) {
    s.frame_times[t] = static_cast<double>(t * kHopSize) / kSampleRate;
  }
  s.bin_freqs.resize(kNumBins);
  for (std::size_t k = 0; k < kNumBins; ++k) s.bin_freqs[k] = static_cast<double>(k) * kBinHz;
  return s;
}

const Matrix& mel_filterbank() {
  static const Matrix fb = [] {
    Matrix m = Matrix::Zero(kMelFilters, kNumBins);
    const double top = hz_to_mel(kSampleRate / 2.0);
    std::vector<double> edges(kMelFilters + 2);
    for (int i = 0; i < kMelFilters + 2; ++i) edges[i] = mel_to_hz(top * i / (kMelFilters + 1));
    for (int f = 0; f < kMelFilters; ++f) {
      const double lo = edges[f], mid = edges[f + 1], hi = edges[f + 2];
      for (std::size_t k = 0; k < kNumBins; ++k) {
        const double hz = static_cast<double>(k) * kBinHz;
        double v = 0.0;
        if (hz > lo && hz <= mid) v = (hz - lo) / (mid - lo);
        else if (hz > mid && hz < hi) v = (hi - hz) / (hi - mid);
        m(f, static_cast<Eigen::Index>(k)) = v;
      }
    }
    return m;
  }();
  return fb;
}

Matrix delta(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Matrix d(n, m.cols());
  const auto row = [&](Eigen::Index t) { return m.row(std::clamp<Eigen::Index>(t, 0, n - 1)); };
  for (Eigen::Index t = 0; t < n; ++t) {
    d.row(t) = ((row(t + 1) - row(t - 1)) + 2.0 * (row(t + 2) - row(t - 2))) / 10.0;
  }
  return d;
}

MfccSet mfcc(const Spectrogram& spec) {
  const Matrix mel = spec.power * mel_filterbank().transpose();
  const Matrix logmel = mel.array().max(kLogFloor).log().matrix();
  MfccSet out;
  out.static_c = logmel * dct_basis().transpose();
  out.delta = delta(out.static_c);
  out.accel = delta(out.delta);
  return out;
}

BandEnergies band_energies(const Spectrogram& spec) {
  BandEnergies b;
  b.e = Matrix::Zero(spec.power.rows(), kNumBands);
  for (int band = 0; band < kNumBands; ++band) {
    const bool last = band == kNumBands - 1;
    for (std::size_t k = 0; k < kNumBins; ++k) {
      const double hz = static_cast<double>(k) * kBinHz;
      const auto& edge = kEnergyBands[static_cast<std::size_t>(band)];
      const bool inside = hz >= edge.lo_hz && (last ? hz <= edge.hi_hz : hz < edge.hi_hz);
      if (inside) b.e.col(band) += spec.power.col(static_cast<Eigen::Index>(k));
    }
  }
  return b;
}

FeatureTensor assemble_features(const Spectrogram& spec, const MfccSet& mfccs,
                                const BandEnergies& energies) {
  const Eigen::Index frames = spec.power.rows();
  if (mfccs.static_c.rows() != frames || mfccs.delta.rows() != frames ||
      mfccs.accel.rows() != frames || energies.e.rows() != frames) {
    throw PreconditionError("feature groups disagree on frame count");
  }
  FeatureTensor f;
  f.x.resize(frames, static_cast<Eigen::Index>(kFeatureWidth));
  auto spec_block = f.x.leftCols(kNumBins);
  spec_block = (spec.power.array() + kLogFloor).log().matrix();
  zscore(spec_block);
  const Matrix* groups[] = {&mfccs.static_c, &mfccs.delta, &mfccs.accel};
  for (int g = 0; g < 3; ++g) {
    auto block = f.x.middleCols(static_cast<Eigen::Index>(kMfccColumn) + g * kMfccCoefficients,
                                kMfccCoefficients);
    block = *groups[g];
    zscore(block);
  }
  for (int band = 0; band < kNumBands; ++band) {
    auto col = f.x.col(static_cast<Eigen::Index>(kEnergyColumn) + band);
    col = energies.e.col(band);
    zscore(col);
  }
  return f;
}

ClipFeatures extract_features(const Clip& clip) {
  if (clip.samples.size() != kClipSamples) {
    throw PreconditionError("clip must hold exactly 60000 samples");
  }
  ClipFeatures out;
  const auto filtered = highpass(std::span<const int16_t>(clip.samples));
  out.spec = spectrogram(filtered);
  out.features = assemble_features(out.spec, mfcc(out.spec), band_energies(out.spec));
  return out;
}

void write_feature_dump(const std::filesystem::path& path, const FeatureTensor& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write feature dump: " + path.string());
  const auto put_u32 = [&os](uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
  };
  put_u32(static_cast<uint32_t>(f.x.rows()));
  put_u32(static_cast<uint32_t>(f.x.cols()));
  for (Eigen::Index i = 0; i < f.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.x.cols(); ++j) {
      const auto v = static_cast<float>(f.x(i, j));
      uint32_t bits = 0;
      std::memcpy(&bits, &v, 4);
      put_u32(bits);
    }
  }
}

Matrix read_feature_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature dump: " + path.string());
  const auto get_u32 = [&in, &path]() {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("truncated feature dump: " + path.string());
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
  };
  const uint32_t rows = get_u32();
  const uint32_t cols = get_u32();
  Matrix m(rows, cols);
  for (uint32_t i = 0; i < rows; ++i) {
    for (uint32_t j = 0; j < cols; ++j) {
      const uint32_t bits = get_u32();
      float v = 0.0f;
      std::memcpy(&v, &bits, 4);
      m(i, j) = v;
    }
  }
  return m;
}

}  // namespace rsed
