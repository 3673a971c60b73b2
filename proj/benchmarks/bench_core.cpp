#include <benchmark/benchmark.h>

#include "lpstab/inverse.hpp"
#include "lpstab/stability.hpp"
#include "lpstab/zoo.hpp"

using namespace lpstab;

namespace {

SpacePtr z(int n) {
  return std::make_shared<const MetricSpace>(MetricSpace::z_interval(n));
}

void BM_Covering(benchmark::State& state) {
  MetricSpace sp = MetricSpace::z_interval(state.range(0));
  for (auto _ : state) {
    auto cov = covering(sp, 16.0, 6.0);
    benchmark::DoNotOptimize(cov.num_colors);
  }
}
BENCHMARK(BM_Covering)->Arg(1000)->Arg(10000);

void BM_SchurNorm(benchmark::State& state) {
  IndexedMatrix a = zoo::polynomial_decay_matrix(z(state.range(0)), 3.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(schur_norm(a));
}
BENCHMARK(BM_SchurNorm)->Arg(200)->Arg(800);

void BM_Localize(benchmark::State& state) {
  IndexedMatrix a = zoo::random_thin_sparse(z(state.range(0)), 2, 5, 0.8,
                                            11, true);
  std::vector<double> f(a.cols(), 1.0);
  for (auto _ : state) {
    auto loc = localize(a, f, 32.0, Exponent(2.0));
    benchmark::DoNotOptimize(loc.certificate.ratio_h);
  }
}
BENCHMARK(BM_Localize)->Arg(1000)->Arg(4000);

void BM_LambdaExact2(benchmark::State& state) {
  IndexedMatrix a = zoo::random_walk_operator(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(lambda_exact_2(a).value);
}
BENCHMARK(BM_LambdaExact2)->Arg(100)->Arg(400);

void BM_TopMThinning(benchmark::State& state) {
  IndexedMatrix a = zoo::random_thin_sparse(z(200), 2, 200, 0.7, 13);
  for (auto _ : state) {
    auto t = top_m_thinning(a, 4, 1.0, Exponent(2.0));
    benchmark::DoNotOptimize(t.measured_2);
  }
}
BENCHMARK(BM_TopMThinning);

void BM_LeftInverse(benchmark::State& state) {
  IndexedMatrix a = zoo::random_walk_operator(state.range(0));
  // shifted to stay invertible
  std::vector<Entry> e = a.entries();
  for (Entry& x : e)
    if (x.row == x.col) x.value += 0.5;
  IndexedMatrix shifted =
      IndexedMatrix::from_entries(a.col_space_ptr(), a.rows(), true, e);
  for (auto _ : state) {
    auto inv = build_left_inverse(shifted);
    benchmark::DoNotOptimize(inv.diagnostics.ba_minus_i_max);
  }
}
BENCHMARK(BM_LeftInverse)->Arg(100)->Arg(300);

}  // namespace

BENCHMARK_MAIN();
