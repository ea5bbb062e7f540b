// Serial reference kernels against their OpenMP counterparts. Set
// OMP_NUM_THREADS to choose the thread count of the omp variants.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "nsda/kernels.hpp"

using namespace nsda;

namespace {

std::vector<cplx> random_coeffs(std::size_t size, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<cplx> v(size);
  for (auto& x : v) x = {d(rng), d(rng)};
  return v;
}

std::vector<Point> random_nodes(int count, double L, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, L);
  std::vector<Point> p(count);
  for (auto& q : p) q = {d(rng), d(rng)};
  return p;
}

template <bool Omp>
void BM_weighted_power(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)), 6.283185307179586);
  const auto a = random_coeffs(g.size(), 1), b = random_coeffs(g.size(), 2);
  for (auto _ : state) {
    const double v = Omp ? kernels::omp::weighted_power(g, a, b, 1.0) : kernels::serial::weighted_power(g, a, b, 1.0);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Omp>
void BM_advect(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)), 6.283185307179586);
  const auto vel = random_coeffs(g.size(), 3), grad = random_coeffs(g.size(), 4);
  std::vector<cplx> out(g.size());
  for (auto _ : state) {
    if (Omp) kernels::omp::advect(vel, grad, out);
    else kernels::serial::advect(vel, grad, out);
    benchmark::ClobberMemory();
  }
}

template <bool Omp>
void BM_voronoi_labels(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)), 6.283185307179586);
  const auto nodes = random_nodes(static_cast<int>(state.range(1)), g.length(), 5);
  for (auto _ : state) {
    auto l = Omp ? kernels::omp::voronoi_labels(g, nodes) : kernels::serial::voronoi_labels(g, nodes);
    benchmark::DoNotOptimize(l.data());
  }
}

template <bool Omp>
void BM_synthesize_at(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)), 6.283185307179586);
  const auto c = random_coeffs(g.size(), 6);
  const auto pts = random_nodes(static_cast<int>(state.range(1)), g.length(), 7);
  for (auto _ : state) {
    auto v = Omp ? kernels::omp::synthesize_at(g, c, pts) : kernels::serial::synthesize_at(g, c, pts);
    benchmark::DoNotOptimize(v.data());
  }
}

}  // namespace

BENCHMARK(BM_weighted_power<false>)->Name("weighted_power/serial")->Arg(128)->Arg(256);
BENCHMARK(BM_weighted_power<true>)->Name("weighted_power/omp")->Arg(128)->Arg(256);
BENCHMARK(BM_advect<false>)->Name("advect/serial")->Arg(128)->Arg(256);
BENCHMARK(BM_advect<true>)->Name("advect/omp")->Arg(128)->Arg(256);
BENCHMARK(BM_voronoi_labels<false>)->Name("voronoi_labels/serial")->Args({128, 1024});
BENCHMARK(BM_voronoi_labels<true>)->Name("voronoi_labels/omp")->Args({128, 1024});
BENCHMARK(BM_synthesize_at<false>)->Name("synthesize_at/serial")->Args({64, 256});
BENCHMARK(BM_synthesize_at<true>)->Name("synthesize_at/omp")->Args({64, 256});

BENCHMARK_MAIN();
