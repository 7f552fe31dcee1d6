#include "roughldp/kernels.hpp"

#include <benchmark/benchmark.h>

namespace {

using roughldp::KernelSpec;
using roughldp::TimeGrid;

void BM_EvalKernelFou(benchmark::State& state) {
  const KernelSpec spec = KernelSpec::fou(0.3, -1.0, 1.0);
  double t = 0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(roughldp::eval_kernel(spec, t, 0.4));
  }
}
BENCHMARK(BM_EvalKernelFou);

void BM_OperatorMatrix(benchmark::State& state) {
  const TimeGrid grid = TimeGrid::uniform(static_cast<std::size_t>(state.range(0)));
  const KernelSpec spec = KernelSpec::fou(0.3, -1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(roughldp::operator_matrix(spec, grid));
  }
}
BENCHMARK(BM_OperatorMatrix)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GramMatrix(benchmark::State& state) {
  const TimeGrid grid = TimeGrid::uniform(static_cast<std::size_t>(state.range(0)));
  const KernelSpec spec = KernelSpec::fou(0.3, -1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(roughldp::gram_matrix(spec, grid));
  }
}
BENCHMARK(BM_GramMatrix)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
