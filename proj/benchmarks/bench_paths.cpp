#include "roughldp/model.hpp"
#include "roughldp/paths.hpp"

#include <benchmark/benchmark.h>

namespace {

using roughldp::Construction;
using roughldp::TimeGrid;

void BM_SampleFou(benchmark::State& state) {
  const TimeGrid grid = TimeGrid::uniform(8);
  const auto construction = static_cast<Construction>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(roughldp::sample_fou(0.3, -1.0, 1.0, grid, 10000, seed++, construction));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SampleFou)
    ->Arg(static_cast<int>(Construction::CovFactor))
    ->Arg(static_cast<int>(Construction::KernelDriven))
    ->Arg(static_cast<int>(Construction::ProductRule))
    ->Unit(benchmark::kMillisecond);

void BM_SimulateTerminal(benchmark::State& state) {
  roughldp::ModelParams params;
  params.hurst = roughldp::HurstParams::from(0.5);
  params.rho = -0.5;
  const TimeGrid grid = TimeGrid::uniform(static_cast<std::size_t>(state.range(0)));
  const auto law = roughldp::InitialLaw::point(0.1);
  const auto scheme = roughldp::RescalingScheme::tails(1.0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(roughldp::simulate_terminal(params, law, scheme, 0.5, grid, grid.size() - 1,
                                                         100000, seed++));
  }
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_SimulateTerminal)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
