// Serial against OpenMP for the two batch kernels.
#include <benchmark/benchmark.h>

#include <random>

#include "plugpull/minsnap.hpp"
#include "plugpull/sweep.hpp"

using namespace plugpull;

namespace {

std::vector<teleop::MinsnapInstance> instances(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-2.0, 2.0), dur(0.5, 10.0);
  std::vector<teleop::MinsnapInstance> in(n);
  for (auto& x : in) x = {Vec3(d(rng), d(rng), d(rng)), Vec3(d(rng), d(rng), d(rng)), d(rng), dur(rng)};
  return in;
}

void BM_MinsnapSerial(benchmark::State& st) {
  const auto in = instances(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(teleop::minsnap_solve_batch_serial(in));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_MinsnapOmp(benchmark::State& st) {
  const auto in = instances(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(teleop::minsnap_solve_batch(in));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

std::vector<sim::ScenarioConfig> scenarios(int n) {
  sim::ScenarioConfig base;
  base.timing.duration = 2.0;
  return sim::seed_variations(base, 1, n);
}

void BM_SweepSerial(benchmark::State& st) {
  const auto cfgs = scenarios(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(sim::run_batch_serial(cfgs));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SweepOmp(benchmark::State& st) {
  const auto cfgs = scenarios(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(sim::run_batch(cfgs));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_MinsnapSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinsnapOmp)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepOmp)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
