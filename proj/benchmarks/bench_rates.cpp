#include "roughldp/rates.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_TailRate(benchmark::State& state) {
  roughldp::ModelParams params;
  params.hurst = roughldp::HurstParams::from(0.3);
  params.rho = -0.5;
  roughldp::RateSetup setup;
  setup.grid_n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(roughldp::tail_rate(params, 1.0, 1.0, setup));
  }
}
BENCHMARK(BM_TailRate)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SmalltimeRate(benchmark::State& state) {
  roughldp::ModelParams params;
  params.hurst = roughldp::HurstParams::from(0.3);
  params.rho = -0.4;
  roughldp::RateSetup setup;
  setup.grid_n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(roughldp::smalltime_rate(params, 0.5, 0.2, setup));
  }
}
BENCHMARK(BM_SmalltimeRate)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
