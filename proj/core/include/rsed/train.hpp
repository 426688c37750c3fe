#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rsed/dataset.hpp"
#include "rsed/model.hpp"

namespace rsed {

struct TrainConfig {
  int batch_size = 64;
  int max_epochs = 5000;
  int patience = 50;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  int fine_tune_epochs = 50;
  uint64_t seed = 0;
  int threads = 1;  // workers for per-clip gradients; results do not depend on it
  ModelDims dims;

  void validate() const;
};

/// Adam with bias correction.
class Adam {
 public:
  Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon);
  void step(std::span<double> params, std::span<const double> grad);
  int steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  int t_ = 0;
};

/// Stops after `patience` consecutive epochs without a strict decrease of the
/// monitored loss.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}
  /// Records one epoch's loss; true if it is a new best.
  bool observe(double loss);
  bool should_stop() const { return wait_ >= patience_; }
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_; }

 private:
  int patience_;
  int epoch_ = 0;
  int wait_ = 0;
  int best_epoch_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

struct TrainResult {
  ModelParams params;              // best-validation parameters
  double initial_train_loss = 0.0;
  double initial_val_loss = 0.0;
  std::vector<double> train_loss;  // per epoch, mean over the epoch's batches
  std::vector<double> val_loss;    // per epoch
  int epochs_run = 0;
  int best_epoch = 0;              // 0 only when no epoch ran
};

/// Mean loss over samples.
double mean_loss(const ModelParams& model, std::span<const Sample> samples, int threads = 1);

/// Mini-batch Adam for at most `max_epochs` epochs with early stopping on the
/// validation loss (training loss if `validation` is empty).
TrainResult train_model(const ModelParams& init, std::span<const Sample> train,
                        std::span<const Sample> validation, const TrainConfig& cfg,
                        int max_epochs);

/// All weights trainable, at most cfg.fine_tune_epochs epochs, same optimizer.
TrainResult fine_tune(const ModelParams& pretrained, std::span<const Sample> train,
                      std::span<const Sample> validation, const TrainConfig& cfg);

enum class ScenarioKind { full, mixed, domain_adapt };

struct FoldData {
  std::vector<Sample> train;
  std::vector<Sample> validation;
};

/// sources[d][f]: fold f of dataset d.
///   full:         one dataset.
///   mixed:        two or more datasets, fold pools concatenated.
///   domain_adapt: `pretrained` (one per fold) fine-tuned on sources[0]; if
///                 `pretrained` is empty, sources[0] is trained from scratch
///                 and then fine-tuned on sources[1].
struct TrainScenario {
  ScenarioKind kind = ScenarioKind::full;
  std::vector<std::vector<FoldData>> sources;
  std::vector<ModelParams> pretrained;
};

/// Seed for fold `fold`'s initialization and shuffling stream.
uint64_t fold_seed(uint64_t base, std::size_t fold);

/// One trained model per fold.
std::vector<TrainResult> train_scenario(const TrainScenario& scenario, EventKind task,
                                        const TrainConfig& cfg);

}  // namespace rsed
