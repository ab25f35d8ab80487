#include <benchmark/benchmark.h>

#include "dqof/anneal.hpp"
#include "dqof/engine.hpp"
#include "dqof/qaoa.hpp"

namespace {

dqof::Assignment random_bits(std::size_t n, std::uint64_t seed) {
  dqof::Rng rng(seed);
  dqof::Assignment x(n);
  for (auto& b : x) b = rng.bit();
  return x;
}

void BM_Evaluate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = dqof::random_hubo(n, 1);
  const auto x = random_bits(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dqof::evaluate(p, x));
  state.counters["terms"] = static_cast<double>(p.term_count());
}
BENCHMARK(BM_Evaluate)->Arg(40)->Arg(100)->Arg(200);

void BM_FlipDelta(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = dqof::random_hubo(n, 1);
  const auto x = random_bits(n, 2);
  dqof::Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dqof::evaluate_flip_delta(p, x, i));
    i = (i + 1) % static_cast<dqof::Index>(n);
  }
}
BENCHMARK(BM_FlipDelta)->Arg(40)->Arg(100)->Arg(200);

void BM_Circuit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto diag = dqof::build_cost_diagonal(dqof::random_hubo(n, 3));
  const auto params = dqof::QaoaParams::constant(2, 0.7, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(dqof::run_circuit(diag, params));
}
BENCHMARK(BM_Circuit)->Arg(8)->Arg(12)->Arg(16);

void BM_SubSolve(benchmark::State& state) {
  const auto p = dqof::random_hubo(40, 4);
  dqof::Rng rng(5);
  const auto subs = dqof::decompose(p, 8, 1, rng);
  const dqof::QaoaSettings settings;
  for (auto _ : state) benchmark::DoNotOptimize(dqof::solve_sub_hubo(subs[0], settings, 6));
}
BENCHMARK(BM_SubSolve)->Unit(benchmark::kMillisecond);

void BM_Aggregate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = dqof::random_hubo(n, 7);
  dqof::Rng rng(8);
  const auto subsets = dqof::random_subsets(p, 8, 2 * ((n + 7) / 8), rng);
  std::vector<dqof::Assignment> bits;
  std::vector<dqof::LocalSolution> sols;
  for (std::size_t k = 0; k < subsets.size(); ++k) bits.push_back(random_bits(8, 100 + k));
  for (std::size_t k = 0; k < subsets.size(); ++k) sols.push_back({subsets[k], bits[k]});
  const auto x = random_bits(n, 9);
  for (auto _ : state) benchmark::DoNotOptimize(dqof::aggregate(p, x, sols));
}
BENCHMARK(BM_Aggregate)->Arg(40)->Arg(200);

void BM_AnnealSweep(benchmark::State& state) {
  const auto p = dqof::random_hubo(100, 10);
  const dqof::AnnealSchedule schedule{10.0, 0.01, 10};
  for (auto _ : state) benchmark::DoNotOptimize(dqof::simulated_annealing(p, schedule, 11));
}
BENCHMARK(BM_AnnealSweep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
