// Serial reference vs OpenMP kernels: trial loop and LIL validity paths.

#include <benchmark/benchmark.h>

#include "purex/experiment.hpp"
#include "purex/lil_validity.hpp"

namespace {

purex::ExperimentConfig bench_config(std::size_t n) {
  purex::ExperimentConfig c;
  c.families = {purex::FamilySpec{purex::Family::OneSparseK, 0.3, purex::KRule::Fixed, 2}};
  c.n_values = {n};
  c.algorithms = {{purex::Algorithm::LilRandLUCB, false}, {purex::Algorithm::LUCBPlusPlus, false}};
  c.trials = 16;
  c.record_wall_time = false;
  return c;
}

void BM_ExperimentSerial(benchmark::State& state) {
  const auto config = bench_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(purex::run_experiment_serial(config));
}

void BM_ExperimentParallel(benchmark::State& state) {
  const auto config = bench_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(purex::run_experiment(config));
}

const purex::LilParams kLil{0.01, 0.5, purex::RadiusVariant::Original};

void BM_LilValiditySerial(benchmark::State& state) {
  const auto paths = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(purex::lil_validity_check_serial(kLil, 0.005, 10'000, paths, 1));
}

void BM_LilValidityParallel(benchmark::State& state) {
  const auto paths = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(purex::lil_validity_check(kLil, 0.005, 10'000, paths, 1));
}

}  // namespace

BENCHMARK(BM_ExperimentSerial)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LilValiditySerial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LilValidityParallel)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
