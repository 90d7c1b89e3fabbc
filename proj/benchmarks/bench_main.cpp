#include <benchmark/benchmark.h>

#include <vector>

#include "sumdca/attention.hpp"
#include "sumdca/knapsack.hpp"
#include "sumdca/model.hpp"
#include "sumdca/random.hpp"
#include "sumdca/segmentation.hpp"
#include "sumdca_oracles/reference.hpp"

namespace {

using namespace sumdca;

Matrix random_features(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  return oracle::random_matrix(rng, rows, cols, 0.0, 1.0);
}

void BM_L2SimilarityDecomposed(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  const Matrix q = random_features(t, 128, 1), k = random_features(t, 128, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_similarity(q, k, SimilarityKind::kL2, 128.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_L2SimilarityDecomposed)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_L2SimilarityPairLoop(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  const Matrix q = random_features(t, 128, 1), k = random_features(t, 128, 2);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::naive_similarity(q, k, SimilarityKind::kL2, 128.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_L2SimilarityPairLoop)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_GdaForward(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  ModelConfig cfg;
  cfg.feature_dim = 64;
  const ModelParams p = init_params(cfg, 3);
  const Matrix x = random_features(t, 64, 4);
  const Matrix pos = sinusoidal_positions(t, 64);
  for (auto _ : state) benchmark::DoNotOptimize(gda_forward(x, p.gda, &pos));
}
BENCHMARK(BM_GdaForward)->Arg(64)->Arg(256);

void BM_LcaForward(benchmark::State& state) {
  ModelConfig cfg;
  cfg.feature_dim = 64;
  const ModelParams p = init_params(cfg, 5);
  const Matrix x = random_features(static_cast<std::size_t>(state.range(0)), 64, 6);
  for (auto _ : state) benchmark::DoNotOptimize(lca_forward(x, p.lca));
}
BENCHMARK(BM_LcaForward)->Arg(64)->Arg(256);

void BM_KnapsackSelect(benchmark::State& state) {
  const auto shots = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  std::vector<std::size_t> lengths(shots);
  std::vector<double> scores(shots);
  std::size_t total = 0;
  for (std::size_t i = 0; i < shots; ++i) {
    lengths[i] = 5 + rng.index(60);
    scores[i] = rng.uniform();
    total += lengths[i];
  }
  const std::size_t budget = total * 15 / 100;
  for (auto _ : state) benchmark::DoNotOptimize(knapsack_select(lengths, scores, budget));
}
BENCHMARK(BM_KnapsackSelect)->Arg(20)->Arg(80);

void BM_KtsSegment(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  Rng rng(8);
  const oracle::PlantedSequence seq = oracle::planted_blocks(rng, t, 64, t / 20, 5, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(kts_segment(seq.features, default_max_shots(t)));
}
BENCHMARK(BM_KtsSegment)->Arg(120)->Arg(320);

}  // namespace

BENCHMARK_MAIN();
