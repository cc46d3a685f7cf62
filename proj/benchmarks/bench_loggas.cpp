#include <benchmark/benchmark.h>

#include "loggas/eqmeasure.hpp"
#include "loggas/finite_n.hpp"
#include "loggas/quaddiff.hpp"
#include "loggas/spectral.hpp"

using namespace loggas;

namespace {

PrecisionContext bench_ctx(const benchmark::State& state) {
  return PrecisionContext::with_bits(static_cast<int>(state.range(0)));
}

void BM_BranchX(benchmark::State& state) {
  const auto ctx = bench_ctx(state);
  PrecisionScope ps(ctx);
  const Complex t(Real(3), Real(1));
  for (auto _ : state) benchmark::DoNotOptimize(branch_x(t, ctx));
}
BENCHMARK(BM_BranchX)->Arg(64)->Arg(256)->Arg(1024);

void BM_Classify(benchmark::State& state) {
  const auto ctx = bench_ctx(state);
  PrecisionScope ps(ctx);
  const Complex t(Real(1.5), Real(-0.5));
  for (auto _ : state) benchmark::DoNotOptimize(classify(t, ctx));
}
BENCHMARK(BM_Classify)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_CriticalGraph(benchmark::State& state) {
  const auto ctx = bench_ctx(state);
  PrecisionScope ps(ctx);
  const SpectralData sd = classify_full(Complex(2), ctx);
  for (auto _ : state) benchmark::DoNotOptimize(critical_graph(sd, ctx));
}
BENCHMARK(BM_CriticalGraph)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_EquilibriumMeasure(benchmark::State& state) {
  const auto ctx = bench_ctx(state);
  PrecisionScope ps(ctx);
  const SzegoData sz = szego(classify_full(Complex(2), ctx), ctx);
  for (auto _ : state) benchmark::DoNotOptimize(equilibrium_measure(sz, 200, ctx));
}
BENCHMARK(BM_EquilibriumMeasure)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_LagrangeConstant(benchmark::State& state) {
  const auto ctx = bench_ctx(state);
  PrecisionScope ps(ctx);
  const SzegoData sz = szego(classify_full(Complex(2), ctx), ctx);
  for (auto _ : state) benchmark::DoNotOptimize(lagrange_constant(sz, ctx));
}
BENCHMARK(BM_LagrangeConstant)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_MomentsRecursion(benchmark::State& state) {
  const auto ctx = PrecisionContext::with_bits(256);
  PrecisionScope ps(ctx);
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(moments(Complex(2), N, 2 * N + 2, MomentSource::Recursion, ctx));
}
BENCHMARK(BM_MomentsRecursion)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_MomentsQuadrature(benchmark::State& state) {
  const auto ctx = PrecisionContext::with_bits(256);
  PrecisionScope ps(ctx);
  for (auto _ : state) benchmark::DoNotOptimize(moments(Complex(2), 8, 12, MomentSource::Quadrature, ctx));
}
BENCHMARK(BM_MomentsQuadrature)->Unit(benchmark::kMillisecond);

void BM_Recurrence(benchmark::State& state) {
  const auto ctx = PrecisionContext::with_bits(256);
  PrecisionScope ps(ctx);
  const MomentTable mt = moments(Complex(2), 8, 26, MomentSource::Recursion, ctx);
  for (auto _ : state) benchmark::DoNotOptimize(recurrence(mt, 12, ctx));
}
BENCHMARK(BM_Recurrence)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
