// Serial reference kernels vs their OpenMP counterparts.
//
//   ./bench_kernels --benchmark_filter=Distances
//   OMP_NUM_THREADS=8 ./bench_kernels

#include <benchmark/benchmark.h>

#include "geomap/kernels.hpp"
#include "geomap/rng.hpp"

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  geomap::Xoshiro256 rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

// Hyperspectral-like shape: ~200 bands, range(0) training samples.
void BM_DistancesSerial(benchmark::State& state) {
  const auto x = random_matrix(200, state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(geomap::serial::pairwise_sq_distances(x));
}
void BM_DistancesParallel(benchmark::State& state) {
  const auto x = random_matrix(200, state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(geomap::parallel::pairwise_sq_distances(x));
}

void BM_CrossDistancesSerial(benchmark::State& state) {
  const auto train = random_matrix(200, 160, 2);
  const auto test = random_matrix(200, state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(geomap::serial::cross_sq_distances(train, test));
}
void BM_CrossDistancesParallel(benchmark::State& state) {
  const auto train = random_matrix(200, 160, 2);
  const auto test = random_matrix(200, state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(geomap::parallel::cross_sq_distances(train, test));
}

Eigen::MatrixXd sparse_laplacian(Eigen::Index p) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  geomap::Xoshiro256 rng(4);
  for (Eigen::Index i = 0; i < p; ++i)
    for (int e = 0; e < 18; ++e) {
      const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(p)));
      if (j == i) continue;
      a(i, j) = a(j, i) = rng.uniform() < 0.5 ? 1.0 : -1.0;
    }
  Eigen::MatrixXd l = -a;
  l.diagonal() += a.rowwise().sum();
  return l;
}

void BM_GraphScatterSerial(benchmark::State& state) {
  const auto x = random_matrix(200, state.range(0), 5);
  const auto l = sparse_laplacian(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(geomap::serial::graph_scatter(x, l));
}
void BM_GraphScatterParallel(benchmark::State& state) {
  const auto x = random_matrix(200, state.range(0), 5);
  const auto l = sparse_laplacian(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(geomap::parallel::graph_scatter(x, l));
}

void BM_RbfGramSerial(benchmark::State& state) {
  const auto x = random_matrix(200, state.range(0), 6);
  for (auto _ : state) benchmark::DoNotOptimize(geomap::serial::rbf_gram(x, x, 1.0 / 200));
}
void BM_RbfGramParallel(benchmark::State& state) {
  const auto x = random_matrix(200, state.range(0), 6);
  for (auto _ : state) benchmark::DoNotOptimize(geomap::parallel::rbf_gram(x, x, 1.0 / 200));
}

}  // namespace

BENCHMARK(BM_DistancesSerial)->Arg(90)->Arg(160)->Arg(400);
BENCHMARK(BM_DistancesParallel)->Arg(90)->Arg(160)->Arg(400);
BENCHMARK(BM_CrossDistancesSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_CrossDistancesParallel)->Arg(1000)->Arg(10000);
BENCHMARK(BM_GraphScatterSerial)->Arg(90)->Arg(160);
BENCHMARK(BM_GraphScatterParallel)->Arg(90)->Arg(160);
BENCHMARK(BM_RbfGramSerial)->Arg(160)->Arg(400);
BENCHMARK(BM_RbfGramParallel)->Arg(160)->Arg(400);

BENCHMARK_MAIN();
