// Serial against OpenMP for the two parallel kernels: the per-round best
// responses and the batch of independent scenario runs.

#include <vector>

#include <benchmark/benchmark.h>

#include "../tests/instances.hpp"
#include "rbresale/scenario.hpp"

using namespace rbresale;

namespace {

std::vector<Participant> big_market(int users) {
  Rng rng = make_stream(1, Stream::Population, 77);
  return testing::random_market(rng, users / 2, users - users / 2);
}

void BM_BestResponses(benchmark::State& state, ExecutionPolicy policy) {
  const auto market = big_market(static_cast<int>(state.range(0)));
  const double q_s = seller_quota_total(market);
  std::vector<double> bids(market.size());
  for (auto _ : state) {
    best_responses(market, 5.0, q_s, bids, policy);
    benchmark::DoNotOptimize(bids.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RunBatch(benchmark::State& state, ExecutionPolicy policy) {
  std::vector<ScenarioConfig> configs;
  for (int i = 0; i < state.range(0); ++i) {
    ScenarioConfig c = reference_config();
    c.scheme = i % 2 ? Scheme::Heuristic : Scheme::Future;
    c.seed = 1 + i / 2;
    c.slots = 48;
    configs.push_back(c);
  }
  for (auto _ : state) {
    auto runs = run_batch(configs, policy);
    benchmark::DoNotOptimize(runs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_BestResponses, serial, ExecutionPolicy::Serial)->Arg(16)->Arg(256);
BENCHMARK_CAPTURE(BM_BestResponses, parallel, ExecutionPolicy::Parallel)->Arg(16)->Arg(256);
BENCHMARK_CAPTURE(BM_RunBatch, serial, ExecutionPolicy::Serial)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunBatch, parallel, ExecutionPolicy::Parallel)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
