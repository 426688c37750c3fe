#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rsed/baseline.hpp"
#include "rsed/config.hpp"
#include "rsed/corpus.hpp"
#include "rsed/dataset.hpp"
#include "rsed/eval.hpp"
#include "rsed/report.hpp"
#include "rsed/train.hpp"

namespace rsed {

/// Model families compared per task. The adaptation strategies fine-tune the
/// other corpus's full model from the same repeat and fold.
enum class Strategy { full_a, full_b, mixed, adapt_b_to_a, adapt_a_to_b };
inline constexpr std::array<Strategy, 5> kAllStrategies{
    Strategy::full_a, Strategy::full_b, Strategy::mixed, Strategy::adapt_b_to_a, Strategy::adapt_a_to_b};

/// File-name safe identifier, e.g. "adapt_b_to_a".
std::string_view strategy_slug(Strategy s);
/// Human label built from corpus names, e.g. "A+B" or "B->A".
std::string strategy_label(Strategy s, const std::string& name_a, const std::string& name_b);

/// One report row: a strategy scored on test set `test_db` (0 = A, 1 = B).
struct ScenarioRow {
  Strategy strategy = Strategy::full_a;
  int test_db = 0;
  std::string_view control;  // "PC", "NC" or empty

  friend bool operator==(const ScenarioRow&, const ScenarioRow&) = default;
};

/// The eight rows per task, test-A block first: PC, NC, mixed, adaptation.
std::array<ScenarioRow, 8> scenario_matrix();

struct ExperimentConfig {
  TrainConfig train;
  int folds = 5;
  int repeats = 3;
  double test_fraction = 0.2;
  uint64_t seed = 0;
  std::vector<EventKind> tasks{EventKind::I, EventKind::E, EventKind::C};
  bool baseline = false;  // score with the untrained energy detector instead of training
  BaselineConfig baseline_cfg;

  void validate() const;
};

/// Keys: folds, repeats, test_fraction, seed, tasks, detector (model|baseline),
/// plus every TrainConfig and baseline.* key.
void apply(const KeyValueConfig& kv, ExperimentConfig& cfg);
/// A config file that reproduces `cfg` when passed back through apply().
void write_config(std::ostream& os, const ExperimentConfig& cfg);

/// Probabilities for one clip's 938 x 193 feature matrix.
using ProbabilityFn = std::function<std::vector<double>(const Matrix& features)>;

ProbabilityFn model_detector(const ModelParams& model);
ProbabilityFn baseline_detector(EventKind task, const BaselineConfig& cfg);

/// Grid threshold over validation samples (see select_threshold).
double select_threshold(const ProbabilityFn& detect, std::span<const Sample> validation);

struct ClipOutcome {
  std::string clip_id;
  ConfusionCounts segments;
  EventCounts events;
  std::vector<double> p;
  std::vector<DetectedEvent> detections;
};

/// Pooled counts are sums over `clips`; AUC is over all pooled segments.
struct EvalOutcome {
  ConfusionCounts segments;
  EventCounts events;
  MetricSet segment_metrics;  // auc included
  EventMetrics event_metrics;
  std::vector<ClipOutcome> clips;
};

EvalOutcome evaluate_detector(const ProbabilityFn& detect, double threshold, EventKind task,
                              const std::vector<const LabeledClip*>& clips,
                              const FeatureStore& store);

struct ModelEval {
  EventKind task = EventKind::I;
  Strategy strategy = Strategy::full_a;
  int test_db = 0;
  int repeat = 0;
  int fold = 0;
  double threshold = 0.5;
  int epochs_run = 0;
  int best_epoch = 0;
  ConfusionCounts segments;
  EventCounts events;
  MetricSet segment_metrics;
  EventMetrics event_metrics;
};

struct ClipEval {
  EventKind task = EventKind::I;
  Strategy strategy = Strategy::full_a;
  int test_db = 0;
  int repeat = 0;
  int fold = 0;
  std::string clip_id;
  ConfusionCounts segments;
  EventCounts events;
};

/// Mean and sample sd over defined values; `stars` is the significance level
/// versus the control (1-3 for p < .05/.01/.001), negative when worse.
struct MetricSummary {
  Ratio mean;
  Ratio sd;
  int n = 0;
  int stars = 0;
};

MetricSummary summarize_metric(std::span<const Ratio> values, std::span<const Ratio> control);
/// "†", "††", "†††", "*", "**", "***" or empty.
std::string significance_marker(int stars);

struct ReportRow {
  ScenarioRow row;
  std::array<MetricSummary, 3> event;    // ppv, sensitivity, f1
  std::array<MetricSummary, 6> segment;  // accuracy, sensitivity, specificity, ppv, f1, auc
};

struct DualRow {
  Strategy strategy = Strategy::full_a;
  std::array<Ratio, 3> event;  // ppv, sensitivity, f1
};

/// Rows of scenario_matrix() aggregated over every model of `task`.
std::vector<ReportRow> build_report_rows(std::span<const ModelEval> models, EventKind task);
/// Per strategy, the label-weighted mean of its mean score on each test set.
std::vector<DualRow> build_dual_rows(std::span<const ModelEval> models, EventKind task,
                                     const std::array<int64_t, 2>& test_label_counts);

struct TaskResult {
  EventKind task = EventKind::I;
  std::array<int64_t, 2> test_label_counts{};
  std::vector<ModelEval> models;
  std::vector<ClipEval> clips;
  std::vector<ReportRow> rows;
  std::vector<DualRow> dual;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct ExperimentResult {
  std::string name_a, name_b;
  SplitSpec split_a, split_b;
  std::vector<FoldPair> folds_a, folds_b;
  std::vector<TaskResult> tasks;
  std::vector<StageTiming> timings;
  std::vector<std::filesystem::path> model_files;
};

/// Trains and scores every strategy for every task, repeat and fold. Models are
/// written under `model_dir/<task>/` unless it is empty. Throws DataError when
/// a corpus has no clip with a task's label.
ExperimentResult run_experiment(const Corpus& a, const Corpus& b, const ExperimentConfig& cfg,
                                const std::filesystem::path& model_dir = {});

Table report_table(const ExperimentResult& r);          // event PPV/SEN/F1 per row
Table segment_report_table(const ExperimentResult& r);  // segment indexes per row
Table dual_table(const ExperimentResult& r);
Table model_table(const ExperimentResult& r);
Table clip_table(const ExperimentResult& r);

/// FNV-1a over clip ids, provenance, samples and labels.
uint64_t corpus_digest(const Corpus& c);

/// Writes every table (CSV and text), split manifests, the config snapshot and
/// manifest.txt into `out_dir`.
void write_experiment_reports(const ExperimentResult& r, const Corpus& a, const Corpus& b,
                              const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace rsed
