#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "resid_edf/data.hpp"
#include "resid_edf/edf.hpp"
#include "resid_edf/harness.hpp"
#include "resid_edf/normtest.hpp"
#include "resid_edf/smoother.hpp"

using namespace resid_edf;

static void BM_SmootherEvaluate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sim = generate(SimDesign{n, ErrorLaw::Normal1, 1, std::nullopt});
  const auto fit = fit_local_poly(sim.sample, 1, ProductKernel(4, 1), bandwidth_rule(n, 1.25),
                                  DomainBox::cube(1, -1, 1));
  double x = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit.evaluate(x));
    x = x > 0.99 ? -1.0 : x + 0.01;
  }
}
BENCHMARK(BM_SmootherEvaluate)->Arg(50)->Arg(250)->Arg(1000)->Arg(10000);

static void BM_CompleteCaseEdf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sim = generate(SimDesign{n, ErrorLaw::Normal1, 2, std::nullopt});
  for (auto _ : state) {
    const auto fit = fit_local_poly(sim.sample, 1, ProductKernel(4, 1), bandwidth_rule(n, 1.25),
                                    DomainBox::cube(1, -1, 1));
    benchmark::DoNotOptimize(edf_complete_case(sim.sample, fit));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CompleteCaseEdf)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_TransformTables(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(TransformTables());
}
BENCHMARK(BM_TransformTables)->Unit(benchmark::kMillisecond);

static void BM_TStatistic(benchmark::State& state) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;
  std::vector<double> r(static_cast<std::size_t>(state.range(0)));
  for (auto& v : r) v = z(gen);
  const auto& tables = TransformTables::standard();
  for (auto _ : state) benchmark::DoNotOptimize(t_statistic(r, tables));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TStatistic)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_RunSingle(benchmark::State& state) {
  ReplicateOutputs outputs;
  outputs.eval_points = {-1.5, -1.0, 0.0, 1.0, 1.5};
  outputs.normtest = true;
  const SimDesign design{static_cast<std::size_t>(state.range(0)), ErrorLaw::Normal1, 0, std::nullopt};
  TransformTables::standard();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_single(++seed, design, outputs));
}
BENCHMARK(BM_RunSingle)->Arg(50)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
