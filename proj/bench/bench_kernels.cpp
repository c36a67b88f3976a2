#include <benchmark/benchmark.h>

#include "snnfra/fuzzyrough.hpp"
#include "snnfra/neighbors.hpp"
#include "snnfra/random.hpp"
#include "snnfra/reference.hpp"

namespace {

snnfra::DenseMatrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  snnfra::Rng rng(seed);
  snnfra::DenseMatrix m(n, d);
  for (double& v : m.data()) v = rng.uniform();
  return m;
}

snnfra::PairDataset random_pairs(std::size_t n, std::size_t d, std::uint64_t seed, const char* prefix) {
  snnfra::Rng rng(seed);
  snnfra::PairDataset out(d);
  for (std::size_t i = 0; i < n; ++i) {
    snnfra::PairSample s;
    s.drug = prefix + std::to_string(i);
    s.target = "t";
    s.label = snnfra::Label::negative;
    s.features.resize(d);
    for (double& v : s.features) v = rng.uniform();
    out.add(std::move(s));
  }
  return out;
}

void BM_PairwiseSerial(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 32, 1);
  for (auto _ : state) benchmark::DoNotOptimize(snnfra::reference::pairwise_distances(pts));
}

void BM_PairwiseParallel(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 32, 1);
  for (auto _ : state) benchmark::DoNotOptimize(snnfra::pairwise_distances(pts));
}

void BM_KnnSerial(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 32, 2);
  for (auto _ : state) benchmark::DoNotOptimize(snnfra::reference::knn_table(pts, 11));
}

void BM_KnnBlocked(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 32, 2);
  for (auto _ : state) benchmark::DoNotOptimize(snnfra::knn_table_blocked(pts, 11, 256));
}

void BM_FruaReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pos = random_pairs(n, 8, 3, "p");
  const auto cand = random_pairs(n, 8, 4, "c");
  const auto kernel = snnfra::fit_scoring_kernel(snnfra::KernelKind::linear, pos, cand);
  for (auto _ : state)
    benchmark::DoNotOptimize(snnfra::reference::averaged_frua(pos, cand, kernel, {}, {2, 2, 5}));
}

void BM_FruaParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pos = random_pairs(n, 8, 3, "p");
  const auto cand = random_pairs(n, 8, 4, "c");
  const auto kernel = snnfra::fit_scoring_kernel(snnfra::KernelKind::linear, pos, cand);
  for (auto _ : state) benchmark::DoNotOptimize(snnfra::averaged_frua(pos, cand, kernel, {}, {2, 2, 5}));
}

}  // namespace

BENCHMARK(BM_PairwiseSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairwiseParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnBlocked)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FruaReference)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FruaParallel)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
