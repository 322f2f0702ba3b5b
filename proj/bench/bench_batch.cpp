// Serial reference against the OpenMP batch runner on a small sweep.

#include <benchmark/benchmark.h>

#include "ppcatt/batch.hpp"

using namespace ppcatt;

namespace {

std::vector<Scenario> sweep(int n) {
  std::vector<Scenario> jobs;
  const Scenario base = *builtin_scenario("robustness");
  for (int i = 0; i < n; ++i) {
    Scenario s = base;
    s.duration = 30.0;
    s.gains.K_omega = 4.0 + 0.25 * i;
    jobs.push_back(s);
  }
  return jobs;
}

void BM_Serial(benchmark::State& state) {
  const auto jobs = sweep(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(jobs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_OpenMP(benchmark::State& state) {
  const auto jobs = sweep(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_batch(jobs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = batch_threads();
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OpenMP)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
