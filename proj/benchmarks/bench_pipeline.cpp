#include <benchmark/benchmark.h>

#include <vector>

#include "otd/eval.hpp"
#include "otd/features.hpp"
#include "otd/forest.hpp"
#include "otd/rng.hpp"
#include "otd/synthgen.hpp"
#include "otd/trigger.hpp"

namespace {

otd::LoggedSegment make_segment(std::uint64_t seed) {
  otd::ScenarioSpec spec;
  spec.kind = otd::ScenarioKind::Overtake;
  spec.seed = seed;
  return otd::crop_log(otd::generate_trace(spec), spec.trigger_time_s);
}

void BM_Featurize(benchmark::State& state) {
  const auto segment = make_segment(1);
  const otd::CropConfig crop_cfg{-20.0, 5.0};
  const otd::WindowConfig window_cfg{state.range(0) == 0 ? 0.0 : 2.0,
                                     otd::FeatureMode::MeanStd};
  const auto slice = otd::crop(segment, crop_cfg);
  for (auto _ : state) {
    auto fm = otd::featurize(slice, window_cfg);
    benchmark::DoNotOptimize(fm.data.data());
  }
}
BENCHMARK(BM_Featurize)->Arg(0)->Arg(1);

struct Blobs {
  std::vector<double> X;
  std::vector<int> y;
  std::size_t rows = 0, cols = 8;
};

Blobs make_blobs(std::size_t rows) {
  Blobs b;
  b.rows = rows;
  otd::Rng rng(7);
  for (std::size_t r = 0; r < rows; ++r) {
    const int label = r % 2 == 0 ? 0 : 1;
    for (std::size_t c = 0; c < b.cols; ++c)
      b.X.push_back(rng.normal(label == 1 ? 1.5 : -1.5, 1.0));
    b.y.push_back(label);
  }
  return b;
}

void BM_ForestTrain(benchmark::State& state) {
  const auto blobs = make_blobs(static_cast<std::size_t>(state.range(0)));
  otd::forest::TrainSettings settings;
  settings.trees = 20;
  for (auto _ : state) {
    auto f = otd::forest::train(blobs.X, blobs.rows, blobs.cols, blobs.y, settings, 3);
    benchmark::DoNotOptimize(f.trees.data());
  }
}
BENCHMARK(BM_ForestTrain)->Arg(200)->Arg(1000);

void BM_ForestPredict(benchmark::State& state) {
  const auto blobs = make_blobs(1000);
  otd::forest::TrainSettings settings;
  const auto f = otd::forest::train(blobs.X, blobs.rows, blobs.cols, blobs.y, settings, 3);
  std::size_t r = 0;
  for (auto _ : state) {
    const std::span<const double> row(blobs.X.data() + r * blobs.cols, blobs.cols);
    benchmark::DoNotOptimize(f.predict(row));
    r = (r + 1) % blobs.rows;
  }
}
BENCHMARK(BM_ForestPredict);

void BM_AucRoc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  otd::Rng rng(11);
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = rng.bernoulli(0.5) ? 1 : 0;
    scores[i] = rng.uniform() + 0.3 * labels[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(otd::auc_roc(scores, labels));
}
BENCHMARK(BM_AucRoc)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
