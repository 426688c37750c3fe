#include <benchmark/benchmark.h>

#include <random>

#include "rsed/eval.hpp"
#include "rsed/features.hpp"
#include "rsed/model.hpp"
#include "rsed/synth.hpp"

namespace {

const rsed::Clip& bench_clip() {
  static const rsed::Corpus corpus = [] {
    rsed::SynthConfig cfg;
    cfg.participants = 1;
    cfg.clips_per_participant = 1;
    return rsed::synth_corpus(cfg, 1);
  }();
  return corpus.clips.front().clip;
}

const rsed::Matrix& bench_features() {
  static const rsed::Matrix x = rsed::extract_features(bench_clip()).features.x;
  return x;
}

rsed::ModelDims dims_for(int64_t channels, int64_t hidden) {
  rsed::ModelDims d;
  d.conv_channels = static_cast<int>(channels);
  d.hidden = static_cast<int>(hidden);
  return d;
}

void BM_ExtractFeatures(benchmark::State& state) {
  const rsed::Clip& clip = bench_clip();
  for (auto _ : state) benchmark::DoNotOptimize(rsed::extract_features(clip));
}
BENCHMARK(BM_ExtractFeatures)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const auto model = rsed::init_model(dims_for(state.range(0), state.range(1)), rsed::EventKind::I, 2);
  const rsed::Matrix& x = bench_features();
  for (auto _ : state) benchmark::DoNotOptimize(rsed::forward(model, x));
}
BENCHMARK(BM_Forward)->Args({16, 16})->Args({64, 32})->Unit(benchmark::kMillisecond);

void BM_LossAndGrad(benchmark::State& state) {
  const auto model = rsed::init_model(dims_for(state.range(0), state.range(1)), rsed::EventKind::I, 3);
  const rsed::Matrix& x = bench_features();
  std::vector<double> target(rsed::kNumSegments, 0.0);
  for (std::size_t j = 0; j < target.size(); j += 3) target[j] = 1.0;
  std::vector<double> grad(model.values().size());
  for (auto _ : state) benchmark::DoNotOptimize(rsed::loss_and_grad(model, x, target, grad));
}
BENCHMARK(BM_LossAndGrad)->Args({16, 16})->Args({64, 32})->Unit(benchmark::kMillisecond);

std::vector<rsed::Interval> random_events(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> gap(0.05, 0.4), len(0.1, 1.2);
  std::vector<rsed::Interval> out;
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    t += gap(rng);
    const double l = len(rng);
    out.push_back({t, t + l});
    t += l;
  }
  return out;
}

void BM_MatchEvents(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto n = static_cast<int>(state.range(0));
  const auto truth = random_events(rng, n);
  const auto pred = random_events(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(rsed::match_events(truth, pred));
  state.SetComplexityN(n);
}
BENCHMARK(BM_MatchEvents)->RangeMultiplier(4)->Range(8, 512)->Complexity();

}  // namespace

BENCHMARK_MAIN();
