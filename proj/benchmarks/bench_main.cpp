#include <benchmark/benchmark.h>

#include "cfmgml/kernels.hpp"
#include "cfmgml/metrics.hpp"
#include "cfmgml/predictor.hpp"
#include "cfmgml/rng.hpp"
#include "cfmgml/synthgen.hpp"
#include "cfmgml/trainer.hpp"

using namespace cfmgml;

namespace {

Dataset bench_dataset(int num_bags) {
  SynthConfig cfg;
  cfg.num_classes = 4;
  cfg.num_bags = num_bags;
  cfg.graphs_min = 3;
  cfg.graphs_max = 6;
  cfg.labels_max = 2;
  cfg.motif_min = 5;
  cfg.motif_max = 8;
  cfg.edge_noise = 0.02;
  cfg.seed = 7;
  return generate(cfg);
}

KernelConfig wl_cfg() {
  KernelConfig cfg;
  cfg.kind = KernelKind::wl_subtree;
  cfg.wl_iterations = 2;
  return cfg;
}

void BM_WlGram(benchmark::State& state) {
  Dataset ds = bench_dataset(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    GramCache gram = compute_gram(ds, wl_cfg(), 1);
    benchmark::DoNotOptimize(gram.values.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(ds.total_graphs() * ds.total_graphs()));
}
BENCHMARK(BM_WlGram)->Arg(20)->Arg(60)->Arg(120);

void BM_TrainRound(benchmark::State& state) {
  Dataset ds = bench_dataset(static_cast<int>(state.range(0)));
  GramCache gram = compute_gram(ds, wl_cfg(), 1);
  TrainConfig cfg;
  cfg.lambda = 1e-4;
  cfg.rounds = 1;
  cfg.iterations = 100;
  cfg.seed = 7;
  for (auto _ : state) {
    auto [model, trace] = train(ds, gram, cfg, 1);
    benchmark::DoNotOptimize(model.coeff.data());
  }
  state.SetItemsProcessed(state.iterations() * cfg.iterations);
}
BENCHMARK(BM_TrainRound)->Arg(20)->Arg(60);

void BM_Predict(benchmark::State& state) {
  Dataset ds = bench_dataset(40);
  GramCache gram = compute_gram(ds, wl_cfg(), 1);
  TrainConfig cfg;
  cfg.lambda = 1e-4;
  cfg.rounds = 2;
  cfg.iterations = 50;
  auto [model, trace] = train(ds, gram, cfg, 1);
  for (auto _ : state) {
    auto preds = predict_dataset(model, ds, GraphPredictMode::argmax,
                                 BagPredictMode::bag_union, 1);
    benchmark::DoNotOptimize(preds.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.bags.size()));
}
BENCHMARK(BM_Predict);

void BM_BagMetrics(benchmark::State& state) {
  Rng rng(1);
  int C = 8, n = 200;
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<int>> preds, truths;
  for (int i = 0; i < n; ++i) {
    std::vector<double> s;
    for (int c = 0; c < C; ++c) s.push_back(rng.uniform01());
    std::vector<int> truth{static_cast<int>(rng.uniform_index(C))};
    std::vector<int> pred{static_cast<int>(rng.uniform_index(C))};
    scores.push_back(std::move(s));
    preds.push_back(std::move(pred));
    truths.push_back(std::move(truth));
  }
  for (auto _ : state) {
    auto r = bag_metrics(scores, preds, truths, C);
    benchmark::DoNotOptimize(&r);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BagMetrics);

}  // namespace

BENCHMARK_MAIN();
