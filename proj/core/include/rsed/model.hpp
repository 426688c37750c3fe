#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rsed/features.hpp"
#include "rsed/segments.hpp"

namespace rsed {

/// Layer sizes of the CNN-BiGRU segment detector.
struct ModelDims {
  int feature_width = static_cast<int>(kFeatureWidth);
  int conv_channels = 64;
  int kernel = 3;  // odd, same-length padding
  int hidden = 32; // per direction

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// A named contiguous range of the flat parameter vector, viewed as rows x cols.
struct ParamBlock {
  std::string name;
  std::size_t offset = 0;
  int rows = 0;
  int cols = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
};

using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

/// All weights of the detector in one flat vector. Layout, in order:
///   conv.w  (C x K*F)  tap-major columns: [tap0 features | tap1 | tap2]
///   conv.b  (1 x C)
///   per direction (fwd, bwd): gru.W (3H x C), gru.U (3H x H), gru.b (1 x 3H),
///     gate rows ordered update, reset, candidate
///   head.w  (1 x 2H)  forward half first
///   head.b  (1 x 1)
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(const ModelDims& dims, EventKind task);

  const ModelDims& dims() const { return dims_; }
  EventKind task() const { return task_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Coarse storage blocks (serialized shape table).
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  /// Fine-grained blocks: conv weight/bias, every GRU gate's W/U/b per direction, head.
  std::vector<ParamBlock> gate_blocks() const;

  ConstMatrixMap view(std::size_t block) const;
  MatrixMap view(std::size_t block);
  MatrixMap view(std::size_t block, std::span<double> external) const;

  enum Block : std::size_t {
    kConvW = 0, kConvB,
    kFwdW, kFwdU, kFwdB,
    kBwdW, kBwdU, kBwdB,
    kHeadW, kHeadB,
    kNumBlocks
  };

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.dims_ == b.dims_ && a.task_ == b.task_ && a.values_ == b.values_;
  }

 private:
  ModelDims dims_;
  EventKind task_ = EventKind::I;
  std::vector<ParamBlock> blocks_;
  std::vector<double> values_;
};

/// Fan-in scaled uniform weights (variance 1/fan_in), zero biases.
ModelParams init_model(const ModelDims& dims, EventKind task, uint64_t seed);

/// conv -> ReLU -> max-pool(2) -> BiGRU -> affine -> logistic.
/// Input frames x feature_width; output ceil(frames/2) probabilities in (0, 1).
SegmentProbabilities forward(const ModelParams& model, const Matrix& features);

/// Mean binary cross-entropy over segments. The gradient is *added* into
/// `grad_accum` (same size as the parameter vector). Returns the loss.
double loss_and_grad(const ModelParams& model, const Matrix& features,
                     std::span<const double> target, std::span<double> grad_accum);

/// Loss only.
double loss(const ModelParams& model, const Matrix& features, std::span<const double> target);

/// The same network run backwards in time: directions swapped and conv taps
/// reversed. forward(mirror(m), reverse(x)) == reverse(forward(m, x)) for even frame counts.
ModelParams mirror_directions(const ModelParams& model);

/// Versioned little-endian binary model file.
inline constexpr uint32_t kModelFormatVersion = 1;
void save_model(const ModelParams& model, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

}  // namespace rsed
