#include "rsed/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "rsed/postprocess.hpp"
#include "rsed/stats.hpp"
#include "rsed/summary.hpp"

namespace rsed {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b = 0) {
  return fold_seed(fold_seed(base, static_cast<std::size_t>(a)), static_cast<std::size_t>(b));
}

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  return buf;
}

std::string full_ratio(const Ratio& r) { return r ? full_precision(*r) : std::string("NA"); }

int64_t count_labels(const std::vector<const LabeledClip*>& clips, EventKind kind) {
  int64_t n = 0;
  for (const LabeledClip* lc : clips) {
    for (const LabelEvent& e : lc->labels) n += e.kind == kind ? 1 : 0;
  }
  return n;
}

bool corpus_has_label(const Corpus& c, EventKind kind) {
  for (const auto& lc : c.clips) {
    if (has_label(lc, kind)) return true;
  }
  return false;
}

std::array<Ratio, 3> event_values(const ModelEval& m) {
  return {m.event_metrics.ppv, m.event_metrics.sensitivity, m.event_metrics.f1};
}

std::array<Ratio, 6> segment_values(const ModelEval& m) {
  const MetricSet& s = m.segment_metrics;
  return {s.accuracy, s.sensitivity, s.specificity, s.ppv, s.f1, s.auc};
}

std::vector<const ModelEval*> models_for(std::span<const ModelEval> models, EventKind task,
                                         Strategy strategy, int test_db) {
  std::vector<const ModelEval*> out;
  for (const ModelEval& m : models) {
    if (m.task == task && m.strategy == strategy && m.test_db == test_db) out.push_back(&m);
  }
  return out;
}

std::string mean_sd_cell(const MetricSummary& s) {
  if (!s.mean) return "NA";
  std::string out = format_fixed(*s.mean, 3);
  out += "±";
  out += s.sd ? format_fixed(*s.sd, 3) : std::string("NA");
  const std::string mark = significance_marker(s.stars);
  if (!mark.empty()) out += " " + mark;
  return out;
}

std::string test_name(const ExperimentResult& r, int db) { return db == 0 ? r.name_a : r.name_b; }

}  // namespace

std::string_view strategy_slug(Strategy s) {
  switch (s) {
    case Strategy::full_a: return "full_a";
    case Strategy::full_b: return "full_b";
    case Strategy::mixed: return "mixed";
    case Strategy::adapt_b_to_a: return "adapt_b_to_a";
    case Strategy::adapt_a_to_b: return "adapt_a_to_b";
  }
  return "unknown";
}

std::string strategy_label(Strategy s, const std::string& name_a, const std::string& name_b) {
  switch (s) {
    case Strategy::full_a: return name_a;
    case Strategy::full_b: return name_b;
    case Strategy::mixed: return name_a + "+" + name_b;
    case Strategy::adapt_b_to_a: return name_b + "->" + name_a;
    case Strategy::adapt_a_to_b: return name_a + "->" + name_b;
  }
  return "unknown";
}

std::array<ScenarioRow, 8> scenario_matrix() {
  return {{
      {Strategy::full_a, 0, "PC"},
      {Strategy::full_b, 0, "NC"},
      {Strategy::mixed, 0, ""},
      {Strategy::adapt_b_to_a, 0, ""},
      {Strategy::full_a, 1, "NC"},
      {Strategy::full_b, 1, "PC"},
      {Strategy::mixed, 1, ""},
      {Strategy::adapt_a_to_b, 1, ""},
  }};
}

void ExperimentConfig::validate() const {
  train.validate();
  if (folds < 2) throw PreconditionError("experiment: folds must be >= 2");
  if (repeats < 1) throw PreconditionError("experiment: repeats must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw PreconditionError("experiment: test_fraction must lie in (0, 1)");
  }
  if (tasks.empty()) throw PreconditionError("experiment: no tasks");
}

void apply(const KeyValueConfig& kv, ExperimentConfig& cfg) {
  apply(kv, cfg.train);
  apply(kv, cfg.baseline_cfg);
  cfg.folds = kv.get_int("folds", cfg.folds);
  cfg.repeats = kv.get_int("repeats", cfg.repeats);
  cfg.test_fraction = kv.get_double("test_fraction", cfg.test_fraction);
  cfg.seed = kv.get_u64("seed", cfg.seed);
  if (auto t = kv.get("tasks")) cfg.tasks = parse_tasks(*t);
  if (auto d = kv.get("detector")) {
    if (*d == "model") {
      cfg.baseline = false;
    } else if (*d == "baseline") {
      cfg.baseline = true;
    } else {
      throw PreconditionError("config: detector must be 'model' or 'baseline'");
    }
  }
  cfg.validate();
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
  write_config(os, cfg.train);
  std::ostringstream s;
  s.precision(17);
  std::string tasks;
  for (EventKind k : cfg.tasks) {
    if (!tasks.empty()) tasks += ',';
    tasks += to_char(k);
  }
  s << "folds = " << cfg.folds << '\n'
    << "repeats = " << cfg.repeats << '\n'
    << "test_fraction = " << cfg.test_fraction << '\n'
    << "seed = " << cfg.seed << '\n'
    << "tasks = " << tasks << '\n'
    << "detector = " << (cfg.baseline ? "baseline" : "model") << '\n'
    << "baseline.band_I = " << cfg.baseline_cfg.band_for_task[0] << '\n'
    << "baseline.band_E = " << cfg.baseline_cfg.band_for_task[1] << '\n'
    << "baseline.band_C = " << cfg.baseline_cfg.band_for_task[2] << '\n'
    << "baseline.gain = " << cfg.baseline_cfg.gain << '\n'
    << "baseline.offset = " << cfg.baseline_cfg.offset << '\n';
  os << s.str();
}

ProbabilityFn model_detector(const ModelParams& model) {
  return [&model](const Matrix& x) { return forward(model, x).p; };
}

ProbabilityFn baseline_detector(EventKind task, const BaselineConfig& cfg) {
  return [task, cfg](const Matrix& x) { return baseline_detect(FeatureTensor{x}, task, cfg).p; };
}

double select_threshold(const ProbabilityFn& detect, std::span<const Sample> validation) {
  std::vector<std::vector<double>> probs;
  std::vector<BinaryVector> truths;
  probs.reserve(validation.size());
  truths.reserve(validation.size());
  for (const Sample& s : validation) {
    probs.push_back(detect(*s.features));
    truths.emplace_back(s.target.begin(), s.target.end());
  }
  std::vector<ThresholdCase> cases;
  for (std::size_t i = 0; i < probs.size(); ++i) cases.push_back({probs[i], truths[i]});
  return select_threshold(cases);
}

EvalOutcome evaluate_detector(const ProbabilityFn& detect, double threshold, EventKind task,
                              const std::vector<const LabeledClip*>& clips,
                              const FeatureStore& store) {
  EvalOutcome out;
  std::vector<ScoredItem> scored;
  for (const LabeledClip* lc : clips) {
    const ClipFeatures& cf = store.get(lc->clip.id);
    ClipOutcome co;
    co.clip_id = lc->clip.id;
    co.p = detect(cf.features.x);
    const BinaryVector truth = rasterize_truth(lc->labels, task);
    const BinaryVector pred = binarize(co.p, threshold);
    co.segments = segment_confusion(pred, truth);
    for (std::size_t j = 0; j < co.p.size(); ++j) scored.push_back({co.p[j], truth[j] != 0});
    co.detections = postprocess(co.p, threshold, cf.spec, task);
    std::vector<LabelEvent> truth_events;
    for (const LabelEvent& e : lc->labels) {
      if (e.kind == task) truth_events.push_back(e);
    }
    co.events = match_events(truth_events, co.detections);
    out.segments += co.segments;
    out.events += co.events;
    out.clips.push_back(std::move(co));
  }
  out.segment_metrics = segment_metrics(out.segments);
  out.segment_metrics.auc = roc_auc(scored);
  out.event_metrics = event_metrics(out.events);
  return out;
}

MetricSummary summarize_metric(std::span<const Ratio> values, std::span<const Ratio> control) {
  std::vector<double> x, y;
  for (const Ratio& v : values) {
    if (v) x.push_back(*v);
  }
  for (const Ratio& v : control) {
    if (v) y.push_back(*v);
  }
  MetricSummary s;
  s.n = static_cast<int>(x.size());
  if (x.empty()) return s;
  s.mean = mean(x);
  s.sd = sample_sd(x);
  if (y.empty()) return s;
  const double p = wilcoxon_rank_sum(x, y).p_value;
  const int level = p < 0.001 ? 3 : p < 0.01 ? 2 : p < 0.05 ? 1 : 0;
  const double my = mean(y);
  if (level > 0 && *s.mean != my) s.stars = *s.mean > my ? level : -level;
  return s;
}

std::string significance_marker(int stars) {
  std::string out;
  for (int i = 0; i < std::abs(stars); ++i) out += stars < 0 ? "†" : "*";
  return out;
}

std::vector<ReportRow> build_report_rows(std::span<const ModelEval> models, EventKind task) {
  std::vector<ReportRow> rows;
  for (const ScenarioRow& sr : scenario_matrix()) {
    const Strategy pc = sr.test_db == 0 ? Strategy::full_a : Strategy::full_b;
    const bool is_pc = sr.strategy == pc;
    const auto mine = models_for(models, task, sr.strategy, sr.test_db);
    const auto ctrl = models_for(models, task, pc, sr.test_db);
    ReportRow row;
    row.row = sr;
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<Ratio> x, y;
      for (const ModelEval* m : mine) x.push_back(event_values(*m)[k]);
      if (!is_pc) {
        for (const ModelEval* m : ctrl) y.push_back(event_values(*m)[k]);
      }
      row.event[k] = summarize_metric(x, y);
    }
    for (std::size_t k = 0; k < 6; ++k) {
      std::vector<Ratio> x, y;
      for (const ModelEval* m : mine) x.push_back(segment_values(*m)[k]);
      if (!is_pc) {
        for (const ModelEval* m : ctrl) y.push_back(segment_values(*m)[k]);
      }
      row.segment[k] = summarize_metric(x, y);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<DualRow> build_dual_rows(std::span<const ModelEval> models, EventKind task,
                                     const std::array<int64_t, 2>& test_label_counts) {
  std::vector<DualRow> out;
  for (Strategy s : kAllStrategies) {
    DualRow row;
    row.strategy = s;
    for (std::size_t k = 0; k < 3; ++k) {
      std::array<Ratio, 2> means;
      for (int db = 0; db < 2; ++db) {
        std::vector<Ratio> v;
        for (const ModelEval* m : models_for(models, task, s, db)) v.push_back(event_values(*m)[k]);
        means[static_cast<std::size_t>(db)] = summarize_metric(v, {}).mean;
      }
      const auto na = static_cast<double>(test_label_counts[0]);
      const auto nb = static_cast<double>(test_label_counts[1]);
      // A side with no labels carries zero weight, so its score may be undefined.
      if (na + nb <= 0.0) continue;
      if ((na > 0.0 && !means[0]) || (nb > 0.0 && !means[1])) continue;
      row.event[k] = weighted_dual_score(means[0].value_or(0.0), na, means[1].value_or(0.0), nb);
    }
    out.push_back(row);
  }
  return out;
}

ExperimentResult run_experiment(const Corpus& a, const Corpus& b, const ExperimentConfig& cfg,
                                const std::filesystem::path& model_dir) {
  cfg.validate();
  for (EventKind task : cfg.tasks) {
    for (const Corpus* c : {&a, &b}) {
      if (!corpus_has_label(*c, task)) {
        throw DataError("corpus '" + c->name + "' has no clip labeled " + std::string(1, to_char(task)));
      }
    }
  }

  ExperimentResult r;
  r.name_a = a.name;
  r.name_b = b.name;
  // Split streams are keyed by corpus content, so swapping roles keeps each corpus's split.
  const uint64_t digest_a = corpus_digest(a), digest_b = corpus_digest(b);
  r.split_a = split_by_participant(a, cfg.test_fraction, derive_seed(cfg.seed, 1, digest_a));
  r.split_b = split_by_participant(b, cfg.test_fraction, derive_seed(cfg.seed, 1, digest_b));
  r.folds_a = make_folds(r.split_a, cfg.folds, cfg.repeats, derive_seed(cfg.seed, 2, digest_a));
  r.folds_b = make_folds(r.split_b, cfg.folds, cfg.repeats, derive_seed(cfg.seed, 2, digest_b));

  auto t0 = Clock::now();
  FeatureStore store_a, store_b;
  store_a.add(a, cfg.train.threads);
  store_b.add(b, cfg.train.threads);
  r.timings.push_back({"features", seconds_since(t0)});

  const std::array<const Corpus*, 2> corpora{&a, &b};
  const std::array<const FeatureStore*, 2> stores{&store_a, &store_b};
  const std::array<const std::vector<FoldPair>*, 2> folds{&r.folds_a, &r.folds_b};
  const std::array<std::vector<const LabeledClip*>, 2> test_clips{select_clips(a, r.split_a.test),
                                                                  select_clips(b, r.split_b.test)};

  for (std::size_t ti = 0; ti < cfg.tasks.size(); ++ti) {
    const EventKind task = cfg.tasks[ti];
    TaskResult tr;
    tr.task = task;
    tr.test_label_counts = {count_labels(test_clips[0], task), count_labels(test_clips[1], task)};
    double train_s = 0.0, eval_s = 0.0;

    for (int rep = 0; rep < cfg.repeats; ++rep) {
      // sets[d][f]: fold data of corpus d.
      std::array<std::vector<FoldData>, 2> sets;
      for (std::size_t d = 0; d < 2; ++d) {
        for (int f = 0; f < cfg.folds; ++f) {
          const FoldPair& fp = (*folds[d])[static_cast<std::size_t>(rep * cfg.folds + f)];
          FoldData fd;
          fd.train = make_samples(select_clips(*corpora[d], fp.train), task, *stores[d]);
          fd.validation = make_samples(select_clips(*corpora[d], fp.validation), task, *stores[d]);
          if (fd.train.empty()) {
            throw DataError("corpus '" + corpora[d]->name + "' repeat " + std::to_string(rep) + " fold " +
                            std::to_string(f) + " has no training clip labeled " +
                            std::string(1, to_char(task)));
          }
          sets[d].push_back(std::move(fd));
        }
      }

      // models[s][f]; for the baseline detector every entry stays empty.
      std::map<Strategy, std::vector<TrainResult>> trained;
      t0 = Clock::now();
      if (!cfg.baseline) {
        const auto strategy_cfg = [&](Strategy s) {
          TrainConfig c = cfg.train;
          c.seed = derive_seed(cfg.seed, 100 + ti, static_cast<uint64_t>(rep) * 8 + static_cast<uint64_t>(s));
          return c;
        };
        const auto params_of = [](const std::vector<TrainResult>& v) {
          std::vector<ModelParams> out;
          for (const auto& t : v) out.push_back(t.params);
          return out;
        };
        trained[Strategy::full_a] = train_scenario({ScenarioKind::full, {sets[0]}, {}}, task,
                                                   strategy_cfg(Strategy::full_a));
        trained[Strategy::full_b] = train_scenario({ScenarioKind::full, {sets[1]}, {}}, task,
                                                   strategy_cfg(Strategy::full_b));
        trained[Strategy::mixed] = train_scenario({ScenarioKind::mixed, {sets[0], sets[1]}, {}}, task,
                                                  strategy_cfg(Strategy::mixed));
        trained[Strategy::adapt_b_to_a] =
            train_scenario({ScenarioKind::domain_adapt, {sets[0]}, params_of(trained[Strategy::full_b])},
                           task, strategy_cfg(Strategy::adapt_b_to_a));
        trained[Strategy::adapt_a_to_b] =
            train_scenario({ScenarioKind::domain_adapt, {sets[1]}, params_of(trained[Strategy::full_a])},
                           task, strategy_cfg(Strategy::adapt_a_to_b));
      }
      train_s += seconds_since(t0);

      t0 = Clock::now();
      for (int f = 0; f < cfg.folds; ++f) {
        const auto fi = static_cast<std::size_t>(f);
        for (Strategy s : kAllStrategies) {
          std::vector<Sample> validation;
          const auto add_val = [&](std::size_t d) {
            validation.insert(validation.end(), sets[d][fi].validation.begin(), sets[d][fi].validation.end());
          };
          const bool uses_a = s == Strategy::full_a || s == Strategy::mixed || s == Strategy::adapt_b_to_a;
          const bool uses_b = s == Strategy::full_b || s == Strategy::mixed || s == Strategy::adapt_a_to_b;
          if (uses_a) add_val(0);
          if (uses_b) add_val(1);
          if (validation.empty()) {
            // No labeled validation clip: fall back to the training pool.
            if (uses_a) validation.insert(validation.end(), sets[0][fi].train.begin(), sets[0][fi].train.end());
            if (uses_b) validation.insert(validation.end(), sets[1][fi].train.begin(), sets[1][fi].train.end());
          }

          ProbabilityFn detect;
          const TrainResult* tres = nullptr;
          if (cfg.baseline) {
            detect = baseline_detector(task, cfg.baseline_cfg);
          } else {
            tres = &trained[s][fi];
            detect = model_detector(tres->params);
            if (!model_dir.empty()) {
              const auto dir = model_dir / std::string(1, to_char(task));
              std::filesystem::create_directories(dir);
              char name[96];
              std::snprintf(name, sizeof name, "%s_r%d_f%d.model", std::string(strategy_slug(s)).c_str(),
                            rep, f);
              save_model(tres->params, dir / name);
              r.model_files.push_back(dir / name);
            }
          }
          const double threshold = select_threshold(detect, validation);

          for (int db = 0; db < 2; ++db) {
            const EvalOutcome eo = evaluate_detector(detect, threshold, task,
                                                     test_clips[static_cast<std::size_t>(db)],
                                                     *stores[static_cast<std::size_t>(db)]);
            ModelEval me;
            me.task = task;
            me.strategy = s;
            me.test_db = db;
            me.repeat = rep;
            me.fold = f;
            me.threshold = threshold;
            if (tres) {
              me.epochs_run = tres->epochs_run;
              me.best_epoch = tres->best_epoch;
            }
            me.segments = eo.segments;
            me.events = eo.events;
            me.segment_metrics = eo.segment_metrics;
            me.event_metrics = eo.event_metrics;
            tr.models.push_back(me);
            for (const ClipOutcome& co : eo.clips) {
              tr.clips.push_back({task, s, db, rep, f, co.clip_id, co.segments, co.events});
            }
          }
        }
      }
      eval_s += seconds_since(t0);
    }
    tr.rows = build_report_rows(tr.models, task);
    tr.dual = build_dual_rows(tr.models, task, tr.test_label_counts);
    r.timings.push_back({std::string("train_") + to_char(task), train_s});
    r.timings.push_back({std::string("evaluate_") + to_char(task), eval_s});
    r.tasks.push_back(std::move(tr));
  }
  return r;
}

Table report_table(const ExperimentResult& r) {
  Table t;
  t.header = {"task", "control", "train", "test", "n_models"};
  for (const char* m : {"ppv", "sen", "f1"}) {
    for (const char* suffix : {"_mean", "_sd", "_sig"}) t.header.push_back(std::string(m) + suffix);
  }
  for (const TaskResult& tr : r.tasks) {
    for (const ReportRow& row : tr.rows) {
      std::vector<std::string> cells{std::string(1, to_char(tr.task)), std::string(row.row.control),
                                     strategy_label(row.row.strategy, r.name_a, r.name_b),
                                     test_name(r, row.row.test_db), std::to_string(row.event[2].n)};
      for (const MetricSummary& s : row.event) {
        cells.push_back(full_ratio(s.mean));
        cells.push_back(full_ratio(s.sd));
        cells.push_back(std::to_string(s.stars));
      }
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

Table segment_report_table(const ExperimentResult& r) {
  Table t;
  t.header = {"task", "control", "train", "test"};
  for (const char* m : {"acc", "sen", "spe", "ppv", "f1", "auc"}) {
    for (const char* suffix : {"_mean", "_sd", "_sig"}) t.header.push_back(std::string(m) + suffix);
  }
  for (const TaskResult& tr : r.tasks) {
    for (const ReportRow& row : tr.rows) {
      std::vector<std::string> cells{std::string(1, to_char(tr.task)), std::string(row.row.control),
                                     strategy_label(row.row.strategy, r.name_a, r.name_b),
                                     test_name(r, row.row.test_db)};
      for (const MetricSummary& s : row.segment) {
        cells.push_back(full_ratio(s.mean));
        cells.push_back(full_ratio(s.sd));
        cells.push_back(std::to_string(s.stars));
      }
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

Table dual_table(const ExperimentResult& r) {
  Table t;
  t.header = {"task", "train", "n_labels_a", "n_labels_b", "ppv", "sen", "f1"};
  for (const TaskResult& tr : r.tasks) {
    for (const DualRow& row : tr.dual) {
      t.rows.push_back({std::string(1, to_char(tr.task)), strategy_label(row.strategy, r.name_a, r.name_b),
                        std::to_string(tr.test_label_counts[0]), std::to_string(tr.test_label_counts[1]),
                        full_ratio(row.event[0]), full_ratio(row.event[1]), full_ratio(row.event[2])});
    }
  }
  return t;
}

Table model_table(const ExperimentResult& r) {
  Table t;
  t.header = {"task", "strategy", "train", "test", "repeat", "fold", "threshold", "epochs_run",
              "best_epoch", "seg_tp", "seg_tn", "seg_fp", "seg_fn", "seg_acc", "seg_sen", "seg_spe",
              "seg_ppv", "seg_f1", "seg_auc", "ev_tp", "ev_fp", "ev_fn", "ev_unpaired_truth",
              "ev_unpaired_pred", "ev_ppv", "ev_sen", "ev_f1"};
  for (const TaskResult& tr : r.tasks) {
    for (const ModelEval& m : tr.models) {
      std::vector<std::string> c{std::string(1, to_char(m.task)), std::string(strategy_slug(m.strategy)),
                                 strategy_label(m.strategy, r.name_a, r.name_b), test_name(r, m.test_db),
                                 std::to_string(m.repeat), std::to_string(m.fold),
                                 format_fixed(m.threshold, 2), std::to_string(m.epochs_run),
                                 std::to_string(m.best_epoch), std::to_string(m.segments.tp),
                                 std::to_string(m.segments.tn), std::to_string(m.segments.fp),
                                 std::to_string(m.segments.fn)};
      for (const Ratio& v : segment_values(m)) c.push_back(full_ratio(v));
      c.push_back(std::to_string(m.events.tp));
      c.push_back(std::to_string(m.events.fp));
      c.push_back(std::to_string(m.events.fn));
      c.push_back(std::to_string(m.events.unpaired_truth));
      c.push_back(std::to_string(m.events.unpaired_pred));
      for (const Ratio& v : event_values(m)) c.push_back(full_ratio(v));
      t.rows.push_back(std::move(c));
    }
  }
  return t;
}

Table clip_table(const ExperimentResult& r) {
  Table t;
  t.header = {"task", "strategy", "test", "repeat", "fold", "clip_id", "seg_tp", "seg_tn", "seg_fp",
              "seg_fn", "ev_tp", "ev_fp", "ev_fn", "ev_unpaired_truth", "ev_unpaired_pred"};
  for (const TaskResult& tr : r.tasks) {
    for (const ClipEval& c : tr.clips) {
      t.rows.push_back({std::string(1, to_char(c.task)), std::string(strategy_slug(c.strategy)),
                        test_name(r, c.test_db), std::to_string(c.repeat), std::to_string(c.fold), c.clip_id,
                        std::to_string(c.segments.tp), std::to_string(c.segments.tn),
                        std::to_string(c.segments.fp), std::to_string(c.segments.fn),
                        std::to_string(c.events.tp), std::to_string(c.events.fp), std::to_string(c.events.fn),
                        std::to_string(c.events.unpaired_truth), std::to_string(c.events.unpaired_pred)});
    }
  }
  return t;
}

uint64_t corpus_digest(const Corpus& c) {
  uint64_t h = 0xcbf29ce484222325ull;
  const auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ull;
    }
  };
  const auto mix_str = [&](const std::string& s) {
    const uint64_t n = s.size();
    mix(&n, sizeof n);
    mix(s.data(), s.size());
  };
  mix_str(c.name);
  for (const auto& lc : c.clips) {
    mix_str(lc.clip.id);
    mix_str(lc.clip.participant_id);
    const int meta[2] = {static_cast<int>(lc.clip.domain), lc.clip.clip_index};
    mix(meta, sizeof meta);
    mix(lc.clip.samples.data(), lc.clip.samples.size() * sizeof(int16_t));
    for (const LabelEvent& e : lc.labels) {
      const char k = to_char(e.kind);
      mix(&k, 1);
      mix(&e.start_s, sizeof e.start_s);
      mix(&e.end_s, sizeof e.end_s);
    }
  }
  return h;
}

void write_experiment_reports(const ExperimentResult& r, const Corpus& a, const Corpus& b,
                              const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto t0 = Clock::now();

  // Event-level table with mean±sd cells and markers, text only.
  Table pretty;
  pretty.header = {"Task", "Control", "Training", "Testing", "PPV", "SEN", "F1"};
  for (const TaskResult& tr : r.tasks) {
    for (const ReportRow& row : tr.rows) {
      pretty.rows.push_back({std::string(1, to_char(tr.task)), std::string(row.row.control),
                             strategy_label(row.row.strategy, r.name_a, r.name_b),
                             test_name(r, row.row.test_db), mean_sd_cell(row.event[0]),
                             mean_sd_cell(row.event[1]), mean_sd_cell(row.event[2])});
    }
  }
  Table pretty_seg;
  pretty_seg.header = {"Task", "Control", "Training", "Testing", "ACC", "SEN", "SPE", "PPV", "F1", "AUC"};
  for (const TaskResult& tr : r.tasks) {
    for (const ReportRow& row : tr.rows) {
      std::vector<std::string> cells{std::string(1, to_char(tr.task)), std::string(row.row.control),
                                     strategy_label(row.row.strategy, r.name_a, r.name_b),
                                     test_name(r, row.row.test_db)};
      for (const MetricSummary& s : row.segment) cells.push_back(mean_sd_cell(s));
      pretty_seg.rows.push_back(std::move(cells));
    }
  }
  Table pretty_dual;
  pretty_dual.header = {"Task", "Training", "PPV", "SEN", "F1"};
  for (const TaskResult& tr : r.tasks) {
    for (const DualRow& row : tr.dual) {
      pretty_dual.rows.push_back({std::string(1, to_char(tr.task)),
                                  strategy_label(row.strategy, r.name_a, r.name_b),
                                  format_ratio(row.event[0], 3), format_ratio(row.event[1], 3),
                                  format_ratio(row.event[2], 3)});
    }
  }

  const auto write_pair = [&out_dir](const Table& csv_table, const Table& text_table, const std::string& stem) {
    std::ofstream csv(out_dir / (stem + ".csv"), std::ios::binary);
    std::ofstream txt(out_dir / (stem + ".txt"), std::ios::binary);
    if (!csv || !txt) throw DataError("cannot write " + (out_dir / stem).string());
    write_csv(csv, csv_table);
    write_text(txt, text_table);
  };
  write_pair(report_table(r), pretty, "event_report");
  write_pair(segment_report_table(r), pretty_seg, "segment_report");
  write_pair(dual_table(r), pretty_dual, "dual_report");
  write_table_files(model_table(r), out_dir / "models");
  write_table_files(clip_table(r), out_dir / "clips");

  std::vector<CorpusSummary> whole{summarize_corpus(a), summarize_corpus(b)};
  write_table_files(summary_table(whole), out_dir / "corpus_summary");
  write_table_files(duration_test_table(whole), out_dir / "corpus_duration_tests");
  std::vector<CorpusSummary> sides{
      summarize_clips(a.name + "_train", select_clips(a, r.split_a.train)),
      summarize_clips(b.name + "_train", select_clips(b, r.split_b.train)),
      summarize_clips(a.name + "_test", select_clips(a, r.split_a.test)),
      summarize_clips(b.name + "_test", select_clips(b, r.split_b.test))};
  write_table_files(summary_table(sides), out_dir / "split_summary");
  write_table_files(duration_test_table(sides), out_dir / "split_duration_tests");

  for (const auto& [name, split, folds] :
       {std::tuple{std::string("split_a.txt"), &r.split_a, &r.folds_a},
        std::tuple{std::string("split_b.txt"), &r.split_b, &r.folds_b}}) {
    std::ofstream os(out_dir / name, std::ios::binary);
    write_split_manifest(os, *split, *folds);
  }
  {
    std::ofstream os(out_dir / "config.snapshot", std::ios::binary);
    write_config(os, cfg);
  }

  std::ofstream m(out_dir / "manifest.txt", std::ios::binary);
  if (!m) throw DataError("cannot write manifest");
  char digest[24];
  m << "# run manifest; rerun with --config config.snapshot on the same corpora\n";
  m << "config = config.snapshot\n";
  m << "seed = " << cfg.seed << '\n';
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(corpus_digest(a)));
  m << "corpus_a = " << a.name << " clips=" << a.clips.size() << " digest=" << digest << '\n';
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(corpus_digest(b)));
  m << "corpus_b = " << b.name << " clips=" << b.clips.size() << " digest=" << digest << '\n';
  m << "split_a = split_a.txt test_fraction=" << format_fixed(r.split_a.achieved_test_fraction(), 4) << '\n';
  m << "split_b = split_b.txt test_fraction=" << format_fixed(r.split_b.achieved_test_fraction(), 4) << '\n';
  for (const char* stem : {"event_report", "segment_report", "dual_report", "models", "clips",
                           "corpus_summary", "corpus_duration_tests", "split_summary",
                           "split_duration_tests"}) {
    m << "artifact = " << stem << ".csv\n";
  }
  for (const auto& p : r.model_files) m << "model = " << p.string() << '\n';
  for (const StageTiming& st : r.timings) m << "time." << st.stage << " = " << format_fixed(st.seconds, 3) << '\n';
  m << "time.reports = " << format_fixed(seconds_since(t0), 3) << '\n';
}

}  // namespace rsed
