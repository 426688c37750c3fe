#include "rsed/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rsed/parallel.hpp"

namespace rsed {

void TrainConfig::validate() const {
  if (batch_size < 1 || max_epochs < 0 || patience < 1 || fine_tune_epochs < 0) {
    throw PreconditionError("train config: batch_size, patience >= 1 and epochs >= 0 required");
  }
  if (!(learning_rate > 0.0)) throw PreconditionError("train config: learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0)) {
    throw PreconditionError("train config: invalid Adam moments");
  }
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw PreconditionError("Adam: size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, t_);
  const double c2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

bool EarlyStopping::observe(double loss) {
  ++epoch_;
  if (loss < best_) {
    best_ = loss;
    best_epoch_ = epoch_;
    wait_ = 0;
    return true;
  }
  ++wait_;
  return false;
}

double mean_loss(const ModelParams& model, std::span<const Sample> samples, int threads) {
  if (samples.empty()) return 0.0;
  std::vector<double> losses(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    losses[i] = loss(model, *samples[i].features, samples[i].target);
  });
  return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(samples.size());
}

TrainResult train_model(const ModelParams& init, std::span<const Sample> train,
                        std::span<const Sample> validation, const TrainConfig& cfg,
                        int max_epochs) {
  cfg.validate();
  if (train.empty()) throw PreconditionError("empty training pool");
  const std::span<const Sample> monitor = validation.empty() ? train : validation;

  TrainResult result;
  result.params = init;
  result.initial_train_loss = mean_loss(init, train, cfg.threads);
  result.initial_val_loss = validation.empty() ? result.initial_train_loss
                                               : mean_loss(init, validation, cfg.threads);
  if (max_epochs <= 0) return result;

  ModelParams params = init;
  const std::size_t n = params.values().size();
  Adam adam(n, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
  EarlyStopping stopper(cfg.patience);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  std::vector<std::vector<double>> per_clip(std::min(batch, train.size()), std::vector<double>(n));
  std::vector<double> per_clip_loss(per_clip.size());
  std::vector<double> grad(n);

  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t count = std::min(batch, order.size() - start);
      parallel_for(count, cfg.threads, [&](std::size_t i) {
        std::fill(per_clip[i].begin(), per_clip[i].end(), 0.0);
        const Sample& s = train[order[start + i]];
        per_clip_loss[i] = loss_and_grad(params, *s.features, s.target, per_clip[i]);
      });
      // Fixed summation order keeps results independent of thread count.
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t k = 0; k < n; ++k) grad[k] += per_clip[i][k];
        epoch_loss += per_clip_loss[i];
      }
      const double inv = 1.0 / static_cast<double>(count);
      for (double& g : grad) g *= inv;
      adam.step(params.values(), grad);
    }
    result.train_loss.push_back(epoch_loss / static_cast<double>(train.size()));
    const double val = mean_loss(params, monitor, cfg.threads);
    result.val_loss.push_back(val);
    result.epochs_run = epoch;
    if (stopper.observe(val)) {
      result.params = params;
      result.best_epoch = epoch;
    }
    if (stopper.should_stop()) break;
  }
  return result;
}

TrainResult fine_tune(const ModelParams& pretrained, std::span<const Sample> train,
                      std::span<const Sample> validation, const TrainConfig& cfg) {
  if (!train.empty() && train.front().features->cols() != pretrained.dims().feature_width) {
    throw PreconditionError("pretrained model does not match the feature width");
  }
  return train_model(pretrained, train, validation, cfg, cfg.fine_tune_epochs);
}

uint64_t fold_seed(uint64_t base, std::size_t fold) {
  // splitmix64 finalizer
  uint64_t z = base + 0x9E3779B97F4A7C15ull * (fold + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<TrainResult> train_scenario(const TrainScenario& scenario, EventKind task,
                                        const TrainConfig& cfg) {
  if (scenario.sources.empty()) throw PreconditionError("scenario has no datasets");
  const std::size_t folds = scenario.sources.front().size();
  for (const auto& src : scenario.sources) {
    if (src.size() != folds) throw PreconditionError("datasets disagree on fold count");
  }
  switch (scenario.kind) {
    case ScenarioKind::full:
      if (scenario.sources.size() != 1) throw PreconditionError("full training uses one dataset");
      break;
    case ScenarioKind::mixed:
      if (scenario.sources.size() < 2) throw PreconditionError("mixed training needs >= 2 datasets");
      break;
    case ScenarioKind::domain_adapt:
      if (scenario.pretrained.empty() ? scenario.sources.size() != 2
                                      : scenario.pretrained.size() != folds) {
        throw PreconditionError("domain adaptation needs a pretrained model per fold or two datasets");
      }
      break;
  }

  std::vector<TrainResult> out;
  for (std::size_t f = 0; f < folds; ++f) {
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = fold_seed(cfg.seed, f);
    if (scenario.kind == ScenarioKind::domain_adapt) {
      ModelParams base;
      if (scenario.pretrained.empty()) {
        const auto& src = scenario.sources[0][f];
        base = train_model(init_model(cfg.dims, task, fold_cfg.seed), src.train, src.validation,
                           fold_cfg, cfg.max_epochs).params;
      } else {
        base = scenario.pretrained[f];
      }
      const auto& tgt = scenario.sources[scenario.pretrained.empty() ? 1 : 0][f];
      if (tgt.train.empty()) throw PreconditionError("empty training pool after label filter");
      out.push_back(fine_tune(base, tgt.train, tgt.validation, fold_cfg));
      continue;
    }
    FoldData pool;
    for (const auto& src : scenario.sources) {
      pool.train.insert(pool.train.end(), src[f].train.begin(), src[f].train.end());
      pool.validation.insert(pool.validation.end(), src[f].validation.begin(), src[f].validation.end());
    }
    if (pool.train.empty()) throw PreconditionError("empty training pool after label filter");
    out.push_back(train_model(init_model(cfg.dims, task, fold_cfg.seed), pool.train,
                              pool.validation, fold_cfg, cfg.max_epochs));
  }
  return out;
}

}  // namespace rsed
