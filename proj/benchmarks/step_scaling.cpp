#include <random>

#include <benchmark/benchmark.h>

#include "ops_ftrl/metrics.hpp"
#include "ops_ftrl/step_solver.hpp"
#include "ops_ftrl/verify.hpp"

namespace {

using namespace ops_ftrl;

// One implicit step; per-step cost should scale linearly in d.
void BM_FtrlStep(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const StepProblem prob = verify::random_step_problem(rng, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ftrl_step(prob));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FtrlStep)->RangeMultiplier(10)->Range(10, 100000)->Complexity(benchmark::oN);

void BM_LearnerUpdate(benchmark::State& state) {
  const auto kind = static_cast<AlgoKind>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const std::size_t T = 256;
  const auto h = generate({MarketKind::kIidUniform, d, T, 3});
  LearnerOptions opt;
  opt.horizon = T;
  for (auto _ : state) {
    auto learner = make_learner(kind, d, opt);
    for (const auto& a : h.rounds()) learner->update(a);
    benchmark::DoNotOptimize(learner->current());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(T));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_LearnerUpdate)
    ->ArgsProduct({{0, 1, 2, 3}, {10, 1000}})
    ->Unit(benchmark::kMillisecond);

void BM_BestCrp(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto h = generate({MarketKind::kIidUniform, d, 2000, 5});
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_crp(h));
  }
}
BENCHMARK(BM_BestCrp)->Arg(2)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
