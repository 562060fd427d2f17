#include <benchmark/benchmark.h>

#include <vector>

#include "geoscale/baselines.hpp"
#include "geoscale/dataset.hpp"
#include "geoscale/distortion.hpp"
#include "geoscale/embedding.hpp"
#include "geoscale/kernel.hpp"
#include "geoscale/parallel.hpp"

namespace {

using namespace geoscale;

PointCloud hourglass(Index n) { return embed_with_noise(generate_hourglass(n, 1), {13, 0.001, 1}); }

void BM_PairwiseDistances(benchmark::State& state) {
  const PointCloud cloud = hourglass(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_sq_dists(cloud));
}
BENCHMARK(BM_PairwiseDistances)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Laplacian(benchmark::State& state) {
  const Matrix sq = pairwise_sq_dists(hourglass(state.range(0)));
  const double eps = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(renormalized_laplacian(heat_kernel(sq, eps)));
}
BENCHMARK(BM_Laplacian)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_EpsilonMin(benchmark::State& state) {
  const Matrix sq = pairwise_sq_dists(hourglass(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(epsilon_min(sq));
}
BENCHMARK(BM_EpsilonMin)->Arg(1000)->Unit(benchmark::kMillisecond);

// One bandwidth of the distortion curve: N' = 200 evaluated points, d' = 2.
void BM_Distortion(benchmark::State& state) {
  const ScopedThreadLimit threads(static_cast<std::size_t>(state.range(1)));
  const PointCloud cloud = hourglass(state.range(0));
  const Matrix sq = pairwise_sq_dists(cloud);
  const std::vector<Index> eval = subsample(cloud, 200, 1);
  for (auto _ : state) benchmark::DoNotOptimize(compute_distortion(cloud, sq, 0.3, 2, eval));
}
BENCHMARK(BM_Distortion)->Args({1000, 1})->Args({1000, 4})->Args({2000, 4})->Unit(benchmark::kMillisecond);

void BM_SpectralNorm(benchmark::State& state) {
  const Matrix a = Matrix::Random(state.range(0), state.range(0));
  const Matrix s = a + a.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(spectral_norm(s));
}
BENCHMARK(BM_SpectralNorm)->Arg(2)->Arg(8);

void BM_ReconstructionError(benchmark::State& state) {
  const PointCloud cloud = hourglass(state.range(0));
  const Matrix sq = pairwise_sq_dists(cloud);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruction_error(cloud, sq, 0.3));
}
BENCHMARK(BM_ReconstructionError)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Eigenmaps(benchmark::State& state) {
  const Matrix sq = pairwise_sq_dists(hourglass(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(laplacian_eigenmaps(sq, 0.3, 3));
}
BENCHMARK(BM_Eigenmaps)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
