#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rsed/config.hpp"
#include "rsed/corpus.hpp"
#include "rsed/dataset.hpp"
#include "rsed/experiment.hpp"
#include "rsed/features.hpp"
#include "rsed/model.hpp"
#include "rsed/plot.hpp"
#include "rsed/postprocess.hpp"
#include "rsed/report.hpp"
#include "rsed/summary.hpp"
#include "rsed/synth.hpp"
#include "rsed/train.hpp"

namespace fs = std::filesystem;
using namespace rsed;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitData = 3;

struct Globals {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out;
  std::string tasks;
  int threads = 1;
};

/// Config file values overlaid by the global flags.
KeyValueConfig load_config(const Globals& g) {
  KeyValueConfig kv = g.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::from_file(g.config_path);
  if (g.seed) kv.set("seed", std::to_string(*g.seed));
  if (!g.tasks.empty()) kv.set("tasks", g.tasks);
  kv.set("threads", std::to_string(g.threads));
  return kv;
}

fs::path require_out(const Globals& g) {
  if (g.out.empty()) throw PreconditionError("--out is required for this command");
  fs::create_directories(g.out);
  return g.out;
}

void warn_unused(const KeyValueConfig& kv) {
  for (const auto& k : kv.unused_keys()) std::cerr << "warning: config key '" << k << "' is not used\n";
}

std::string file_safe(std::string id) {
  for (char& c : id) {
    if (c == '#' || c == '/' || c == '\\' || c == ' ') c = '_';
  }
  return id;
}

/// A trained model with its validation-selected threshold, or the baseline.
struct TaskDetector {
  EventKind task = EventKind::I;
  std::optional<ModelParams> model;
  double threshold = 0.5;
  ProbabilityFn fn;
};

std::vector<TaskDetector> load_detectors(const std::vector<EventKind>& tasks, const std::string& model_dir,
                                         bool baseline, std::optional<double> threshold,
                                         const BaselineConfig& bcfg) {
  if (model_dir.empty() == !baseline) {
    throw PreconditionError("give exactly one of --model-dir or --baseline");
  }
  std::vector<TaskDetector> out(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    TaskDetector& d = out[i];
    d.task = tasks[i];
    if (baseline) {
      d.fn = baseline_detector(d.task, bcfg);
    } else {
      const fs::path base = fs::path(model_dir) / std::string(1, to_char(d.task));
      d.model = load_model(fs::path(base).replace_extension(".model"));
      if (d.model->task() != d.task) throw DataError("model file task does not match " + base.string());
      std::ifstream th(fs::path(base).replace_extension(".threshold"));
      if (th) th >> d.threshold;
    }
    if (threshold) d.threshold = *threshold;
    if (!(d.threshold >= 0.0 && d.threshold <= 1.0)) throw PreconditionError("threshold must lie in [0, 1]");
  }
  // Bind after the vector is final so the captured model addresses stay valid.
  for (TaskDetector& d : out) {
    if (d.model) d.fn = model_detector(*d.model);
  }
  return out;
}

std::vector<const LabeledClip*> all_clips(const Corpus& c) {
  std::vector<const LabeledClip*> out;
  for (const auto& lc : c.clips) out.push_back(&lc);
  return out;
}

Corpus corpus_from_input(const std::string& corpus_dir, const std::vector<std::string>& wavs) {
  if (corpus_dir.empty() == wavs.empty()) throw PreconditionError("give exactly one of --corpus or --wav");
  if (!corpus_dir.empty()) return load_corpus(corpus_dir);
  Corpus c;
  c.name = "input";
  for (const auto& w : wavs) {
    const fs::path p(w);
    for (Clip& clip : truncate_to_clips(load_recording(p, p.stem().string(), Domain::lung))) {
      c.clips.push_back({std::move(clip), {}});
    }
  }
  return c;
}

int cmd_ingest(const Globals& g, const std::string& input, std::string name, const std::string& domain) {
  const fs::path out = require_out(g);
  if (name.empty()) name = fs::path(input).filename().string();
  const Corpus c = ingest_directory(input, name, parse_domain(domain));
  save_corpus(c, out);
  std::cout << "ingested " << c.clips.size() << " clips into " << out.string() << '\n';
  return 0;
}

int cmd_synth(const Globals& g, const std::string& name, bool shifted) {
  const fs::path out = require_out(g);
  KeyValueConfig kv = load_config(g);
  SynthConfig cfg;
  if (!name.empty()) cfg.name = name;
  if (shifted) cfg.bands = shifted_profile();
  apply(kv, cfg);
  const uint64_t seed = kv.get_u64("seed", 0);
  kv.get("tasks");
  kv.get("threads");
  warn_unused(kv);
  const Corpus c = synth_corpus(cfg, seed);
  save_corpus(c, out);
  std::cout << "wrote " << c.clips.size() << " synthetic clips to " << out.string() << '\n';
  return 0;
}

int cmd_summarize(const Globals& g, const std::vector<std::string>& corpora) {
  std::vector<CorpusSummary> summaries;
  for (const auto& dir : corpora) summaries.push_back(summarize_corpus(load_corpus(dir)));
  const Table s = summary_table(summaries);
  const Table t = duration_test_table(summaries);
  if (!g.out.empty()) {
    const fs::path out = require_out(g);
    write_table_files(s, out / "corpus_summary");
    write_table_files(t, out / "corpus_duration_tests");
  }
  write_text(std::cout, s);
  if (!t.rows.empty()) {
    std::cout << '\n';
    write_text(std::cout, t);
  }
  return 0;
}

int cmd_train(const Globals& g, const std::string& corpus_dir, const std::string& mix_dir,
              const std::string& pretrained_dir, int fold) {
  const fs::path out = require_out(g);
  const KeyValueConfig kv = load_config(g);
  ExperimentConfig cfg;
  apply(kv, cfg);
  warn_unused(kv);
  if (!mix_dir.empty() && !pretrained_dir.empty()) {
    throw PreconditionError("--mix and --pretrained are mutually exclusive");
  }
  if (fold < 0 || fold >= cfg.folds) throw PreconditionError("--fold must lie in [0, folds)");

  std::vector<Corpus> corpora{load_corpus(corpus_dir)};
  if (!mix_dir.empty()) corpora.push_back(load_corpus(mix_dir));
  std::vector<FeatureStore> stores(corpora.size());
  std::vector<FoldPair> pairs;
  for (std::size_t d = 0; d < corpora.size(); ++d) {
    stores[d].add(corpora[d], cfg.train.threads);
    const SplitSpec split = split_by_participant(corpora[d], cfg.test_fraction, cfg.seed);
    pairs.push_back(make_folds(split, cfg.folds, 1, cfg.seed)[static_cast<std::size_t>(fold)]);
  }

  for (EventKind task : cfg.tasks) {
    FoldData pool;
    for (std::size_t d = 0; d < corpora.size(); ++d) {
      auto tr = make_samples(select_clips(corpora[d], pairs[d].train), task, stores[d]);
      auto va = make_samples(select_clips(corpora[d], pairs[d].validation), task, stores[d]);
      pool.train.insert(pool.train.end(), tr.begin(), tr.end());
      pool.validation.insert(pool.validation.end(), va.begin(), va.end());
    }
    if (pool.train.empty()) {
      throw DataError(std::string("no training clip labeled ") + to_char(task));
    }
    TrainConfig tcfg = cfg.train;
    tcfg.seed = fold_seed(cfg.seed, static_cast<std::size_t>(task));
    TrainResult res;
    if (!pretrained_dir.empty()) {
      const ModelParams base =
          load_model(fs::path(pretrained_dir) / (std::string(1, to_char(task)) + ".model"));
      res = fine_tune(base, pool.train, pool.validation, tcfg);
    } else {
      res = train_model(init_model(tcfg.dims, task, tcfg.seed), pool.train, pool.validation, tcfg,
                        tcfg.max_epochs);
    }
    const std::span<const Sample> thr_pool =
        pool.validation.empty() ? std::span<const Sample>(pool.train) : std::span<const Sample>(pool.validation);
    const double threshold = select_threshold(model_detector(res.params), thr_pool);
    const std::string stem = std::string(1, to_char(task));
    save_model(res.params, out / (stem + ".model"));
    std::ofstream(out / (stem + ".threshold")) << format_fixed(threshold, 2) << '\n';
    std::ofstream log(out / (stem + ".loss.csv"));
    log << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < res.train_loss.size(); ++e) {
      log << e + 1 << ',' << format_fixed(res.train_loss[e], 8) << ',' << format_fixed(res.val_loss[e], 8) << '\n';
    }
    std::cout << "task " << to_char(task) << ": " << res.epochs_run << " epochs, best " << res.best_epoch
              << ", threshold " << format_fixed(threshold, 2) << '\n';
  }
  return 0;
}

int cmd_detect(const Globals& g, const std::string& corpus_dir, const std::vector<std::string>& wavs,
               const std::string& model_dir, bool baseline, std::optional<double> threshold) {
  const fs::path out = require_out(g);
  const KeyValueConfig kv = load_config(g);
  ExperimentConfig cfg;
  apply(kv, cfg);
  const Corpus c = corpus_from_input(corpus_dir, wavs);
  const auto detectors = load_detectors(cfg.tasks, model_dir, baseline, threshold, cfg.baseline_cfg);
  std::ofstream probs(out / "probabilities.csv", std::ios::binary);
  probs << "clip_id,task,segment,start_s,end_s,p\n";
  for (const auto& lc : c.clips) {
    const ClipFeatures cf = extract_features(lc.clip);
    std::vector<DetectedEvent> all;
    for (const TaskDetector& d : detectors) {
      const auto p = d.fn(cf.features.x);
      for (std::size_t j = 0; j < p.size(); ++j) {
        probs << lc.clip.id << ',' << to_char(d.task) << ',' << j << ',' << format_fixed(segment_start(j), 3)
              << ',' << format_fixed(segment_end(j), 3) << ',' << format_fixed(p[j], 6) << '\n';
      }
      const auto ev = postprocess(p, d.threshold, cf.spec, d.task);
      all.insert(all.end(), ev.begin(), ev.end());
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const DetectedEvent& a, const DetectedEvent& b) { return a.start_s < b.start_s; });
    std::ofstream ev(out / (file_safe(lc.clip.id) + ".txt"), std::ios::binary);
    serialize_events(ev, all);
  }
  std::cout << "detections for " << c.clips.size() << " clips written to " << out.string() << '\n';
  return 0;
}

int cmd_evaluate(const Globals& g, const std::string& corpus_dir, const std::string& model_dir, bool baseline,
                 std::optional<double> threshold, bool test_only) {
  const fs::path out = require_out(g);
  const KeyValueConfig kv = load_config(g);
  ExperimentConfig cfg;
  apply(kv, cfg);
  const Corpus c = load_corpus(corpus_dir);
  std::vector<const LabeledClip*> clips =
      test_only ? select_clips(c, split_by_participant(c, cfg.test_fraction, cfg.seed).test) : all_clips(c);
  FeatureStore store;
  store.add(c, cfg.train.threads);
  const auto detectors = load_detectors(cfg.tasks, model_dir, baseline, threshold, cfg.baseline_cfg);

  Table pooled;
  pooled.header = {"task", "threshold", "clips", "seg_tp", "seg_tn", "seg_fp", "seg_fn", "seg_acc", "seg_sen",
                   "seg_spe", "seg_ppv", "seg_f1", "seg_auc", "ev_tp", "ev_fp", "ev_fn", "ev_unpaired_truth",
                   "ev_unpaired_pred", "ev_ppv", "ev_sen", "ev_f1"};
  Table per_clip;
  per_clip.header = {"task", "clip_id", "seg_tp", "seg_tn", "seg_fp", "seg_fn", "ev_tp", "ev_fp", "ev_fn",
                     "ev_unpaired_truth", "ev_unpaired_pred"};
  for (const TaskDetector& d : detectors) {
    const EvalOutcome eo = evaluate_detector(d.fn, d.threshold, d.task, clips, store);
    const std::string k(1, to_char(d.task));
    const MetricSet& s = eo.segment_metrics;
    pooled.rows.push_back({k, format_fixed(d.threshold, 2), std::to_string(clips.size()),
                           std::to_string(eo.segments.tp), std::to_string(eo.segments.tn),
                           std::to_string(eo.segments.fp), std::to_string(eo.segments.fn),
                           format_ratio(s.accuracy, 6), format_ratio(s.sensitivity, 6),
                           format_ratio(s.specificity, 6), format_ratio(s.ppv, 6), format_ratio(s.f1, 6),
                           format_ratio(s.auc, 6), std::to_string(eo.events.tp), std::to_string(eo.events.fp),
                           std::to_string(eo.events.fn), std::to_string(eo.events.unpaired_truth),
                           std::to_string(eo.events.unpaired_pred), format_ratio(eo.event_metrics.ppv, 6),
                           format_ratio(eo.event_metrics.sensitivity, 6), format_ratio(eo.event_metrics.f1, 6)});
    for (const ClipOutcome& co : eo.clips) {
      per_clip.rows.push_back({k, co.clip_id, std::to_string(co.segments.tp), std::to_string(co.segments.tn),
                               std::to_string(co.segments.fp), std::to_string(co.segments.fn),
                               std::to_string(co.events.tp), std::to_string(co.events.fp),
                               std::to_string(co.events.fn), std::to_string(co.events.unpaired_truth),
                               std::to_string(co.events.unpaired_pred)});
    }
  }
  write_table_files(pooled, out / "evaluation");
  write_table_files(per_clip, out / "evaluation_clips");
  write_text(std::cout, pooled);
  return 0;
}

int cmd_experiment(const Globals& g, const std::string& a_dir, const std::string& b_dir, bool synthetic) {
  const fs::path out = require_out(g);
  const KeyValueConfig kv = load_config(g);
  ExperimentConfig cfg;
  apply(kv, cfg);
  Corpus a, b;
  if (synthetic) {
    if (!a_dir.empty() || !b_dir.empty()) throw PreconditionError("--synthetic excludes --corpus-a/--corpus-b");
    SynthConfig sa;
    sa.name = "A";
    SynthConfig sb;
    sb.name = "B";
    sb.bands = shifted_profile();
    sb.tracheal_fraction = 1.0;
    apply(kv, sa, "synth_a.");
    apply(kv, sb, "synth_b.");
    a = synth_corpus(sa, fold_seed(cfg.seed, 11));
    b = synth_corpus(sb, fold_seed(cfg.seed, 12));
  } else {
    if (a_dir.empty() || b_dir.empty()) throw PreconditionError("give --corpus-a and --corpus-b, or --synthetic");
    a = load_corpus(a_dir);
    b = load_corpus(b_dir);
  }
  warn_unused(kv);
  const ExperimentResult r = run_experiment(a, b, cfg, cfg.baseline ? fs::path{} : out / "models");
  write_experiment_reports(r, a, b, cfg, out);
  std::ifstream report(out / "event_report.txt");
  std::cout << report.rdbuf() << '\n';
  std::ifstream dual(out / "dual_report.txt");
  std::cout << dual.rdbuf();
  return 0;
}

int cmd_plot(const Globals& g, const std::string& corpus_dir, const std::vector<std::string>& clip_ids,
             const std::string& model_dir, bool baseline, std::optional<double> threshold) {
  const fs::path out = require_out(g);
  const KeyValueConfig kv = load_config(g);
  ExperimentConfig cfg;
  apply(kv, cfg);
  const Corpus c = load_corpus(corpus_dir);
  std::vector<TaskDetector> detectors;
  if (!model_dir.empty() || baseline) {
    detectors = load_detectors(cfg.tasks, model_dir, baseline, threshold, cfg.baseline_cfg);
  }
  std::vector<const LabeledClip*> chosen;
  if (clip_ids.empty()) {
    chosen = all_clips(c);
  } else {
    for (const auto& id : clip_ids) chosen.push_back(&c.at(id));
  }
  for (const LabeledClip* lc : chosen) {
    const ClipFeatures cf = extract_features(lc->clip);
    std::vector<LabelEvent> labels;
    for (const LabelEvent& e : lc->labels) {
      if (std::find(cfg.tasks.begin(), cfg.tasks.end(), e.kind) != cfg.tasks.end()) labels.push_back(e);
    }
    std::vector<DetectedEvent> detections;
    for (const TaskDetector& d : detectors) {
      const auto ev = postprocess(d.fn(cf.features.x), d.threshold, cf.spec, d.task);
      detections.insert(detections.end(), ev.begin(), ev.end());
    }
    emit_plot(out / (file_safe(lc->clip.id) + ".svg"), c.name + " / " + lc->clip.id, cf.spec, labels,
              detections);
  }
  std::cout << "wrote " << chosen.size() << " plots to " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Respiratory sound event detection toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "base random seed");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--tasks", g.tasks, "comma-separated subset of I,E,C");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);

  std::string input, name, domain = "lung";
  auto* ingest = app.add_subcommand("ingest", "WAV recordings and label files -> corpus bundle");
  ingest->add_option("input", input, "directory of .wav and .txt files")->required()->check(CLI::ExistingDirectory);
  ingest->add_option("--name", name, "corpus name (default: directory name)");
  ingest->add_option("--domain", domain, "lung or tracheal");

  bool shifted = false;
  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus bundle");
  synth->add_option("--name", name, "corpus name");
  synth->add_flag("--shifted", shifted, "use the shifted band profile");

  std::vector<std::string> corpora;
  auto* summarize = app.add_subcommand("summarize", "label statistics and duration t-tests");
  summarize->add_option("corpora", corpora, "corpus bundle directories")->required()->check(CLI::ExistingDirectory);

  std::string corpus_dir, mix_dir, pretrained_dir, model_dir;
  int fold = 0;
  auto* train = app.add_subcommand("train", "train one detector per task");
  train->add_option("--corpus", corpus_dir, "corpus bundle")->required()->check(CLI::ExistingDirectory);
  train->add_option("--mix", mix_dir, "second corpus for mixed-set training")->check(CLI::ExistingDirectory);
  train->add_option("--pretrained", pretrained_dir, "directory of <task>.model files to fine-tune")
      ->check(CLI::ExistingDirectory);
  train->add_option("--fold", fold, "validation fold index");

  std::vector<std::string> wavs;
  bool baseline = false;
  std::optional<double> threshold;
  bool test_only = false;
  auto* detect = app.add_subcommand("detect", "run detectors and write event files");
  detect->add_option("--corpus", corpus_dir, "corpus bundle")->check(CLI::ExistingDirectory);
  detect->add_option("--wav", wavs, "WAV recordings")->check(CLI::ExistingFile);
  detect->add_option("--model-dir", model_dir, "directory with <task>.model and <task>.threshold");
  detect->add_flag("--baseline", baseline, "use the untrained energy detector");
  detect->add_option("--threshold", threshold, "override the stored threshold");

  auto* evaluate = app.add_subcommand("evaluate", "segment and event metrics on a labeled corpus");
  evaluate->add_option("--corpus", corpus_dir, "corpus bundle")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--model-dir", model_dir, "directory with <task>.model and <task>.threshold");
  evaluate->add_flag("--baseline", baseline, "use the untrained energy detector");
  evaluate->add_option("--threshold", threshold, "override the stored threshold");
  evaluate->add_flag("--test-split", test_only, "score only the participant-disjoint test side");

  std::string a_dir, b_dir;
  bool synthetic = false;
  auto* experiment = app.add_subcommand("experiment", "full strategy comparison over two corpora");
  experiment->add_option("--corpus-a", a_dir, "first corpus bundle")->check(CLI::ExistingDirectory);
  experiment->add_option("--corpus-b", b_dir, "second corpus bundle")->check(CLI::ExistingDirectory);
  experiment->add_flag("--synthetic", synthetic, "generate both corpora (synth_a.* / synth_b.* keys)");

  std::vector<std::string> clip_ids;
  auto* plot = app.add_subcommand("plot", "SVG spectrograms with truth and detection lanes");
  plot->add_option("--corpus", corpus_dir, "corpus bundle")->required()->check(CLI::ExistingDirectory);
  plot->add_option("--clip", clip_ids, "clip ids (default: all)");
  plot->add_option("--model-dir", model_dir, "directory with <task>.model and <task>.threshold");
  plot->add_flag("--baseline", baseline, "use the untrained energy detector");
  plot->add_option("--threshold", threshold, "override the stored threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitPrecondition;
  }

  try {
    if (*ingest) return cmd_ingest(g, input, name, domain);
    if (*synth) return cmd_synth(g, name, shifted);
    if (*summarize) return cmd_summarize(g, corpora);
    if (*train) return cmd_train(g, corpus_dir, mix_dir, pretrained_dir, fold);
    if (*detect) return cmd_detect(g, corpus_dir, wavs, model_dir, baseline, threshold);
    if (*evaluate) return cmd_evaluate(g, corpus_dir, model_dir, baseline, threshold, test_only);
    if (*experiment) return cmd_experiment(g, a_dir, b_dir, synthetic);
    if (*plot) return cmd_plot(g, corpus_dir, clip_ids, model_dir, baseline, threshold);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitPrecondition;
}
