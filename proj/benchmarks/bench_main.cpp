#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>

#include "miub/adversary.hpp"
#include "miub/engine.hpp"
#include "miub/verify.hpp"

namespace {

using namespace miub;

HardwareConfig hardware(std::uint32_t cores) {
  HardwareConfig hw;
  hw.n_cores = cores;
  hw.geometry.num_sets = 64;
  hw.l_mem = 40;
  return hw;
}

TaskTrace random_task(std::size_t len, const CacheGeometry& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> tag(0, 7), set(0, g.num_sets - 1);
  std::uniform_int_distribution<Cycle> gap(0, 20);
  TaskTrace t;
  for (std::size_t i = 0; i < len; ++i) t.accesses.push_back(Access{compose(tag(rng), set(rng), g), gap(rng), i % 2 == 0});
  return t;
}

SearchSpace tiny_space(std::uint32_t cores, std::size_t target_len) {
  SearchSpace s;
  s.n_cores = cores;
  s.geometry.num_sets = 2;
  s.l_mem = 4;
  s.address_universe = SearchSpace::grid_universe(2, 2, s.geometry);
  s.max_adversary_trace_len = 2;
  s.offset_grid = {-8, -4, 0, 4};
  s.gap_grid = {0, 4};
  s.target_length = target_len;
  return s;
}

void BM_BaselineSimulation(benchmark::State& state) {
  const auto hw = hardware(static_cast<std::uint32_t>(state.range(0)));
  const auto task = random_task(static_cast<std::size_t>(state.range(1)), hw.geometry, 7);
  const auto cfg = build_baseline(task, hw);
  const ArbitrationPolicy policy = PessimisticForT{};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(hw, task, cfg, policy).total_interference_critical);
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_BaselineSimulation)->Args({2, 64})->Args({4, 64})->Args({8, 64})->Args({4, 1024});

void BM_EnumerateSpace(benchmark::State& state) {
  const auto space = tiny_space(3, 1);
  for (auto _ : state) {
    const auto cs = enumerate_configs(space, 1'000'000);
    std::uint64_t n = 0;
    for (auto it = cs.begin(); it != cs.end(); ++it) n += (*it).adversaries.size();
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_EnumerateSpace)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveVerify(benchmark::State& state) {
  const auto space = tiny_space(2, 1);
  const auto task = random_task(1, space.geometry, 3);
  const ArbitrationPolicy policy = PessimisticForT{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_upper_bound(space, task, policy, SearchMode::exhaustive()).max_observed);
  }
}
BENCHMARK(BM_ExhaustiveVerify)->Unit(benchmark::kMillisecond);

void BM_SampledVerify(benchmark::State& state) {
  auto space = tiny_space(4, 2);
  space.max_adversary_trace_len = 3;
  const auto task = random_task(2, space.geometry, 5);
  const ArbitrationPolicy policy = PessimisticForT{};
  VerifyOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        verify_upper_bound(space, task, policy, SearchMode::sampled(20'000, 11), opts).max_observed);
  }
}
BENCHMARK(BM_SampledVerify)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
