#include <benchmark/benchmark.h>

#include "homophily/netsim.hpp"

using namespace homophily;

namespace {

void BM_PreNetwork(benchmark::State& state) {
  SimConfig c;
  c.n_nodes = static_cast<int>(state.range(0));
  c.horizon_pre = 50;
  for (auto _ : state) {
    const NetsimRun run = generate_pre_network(c);
    benchmark::DoNotOptimize(run.log.size());
    ++c.seed;
  }
}
BENCHMARK(BM_PreNetwork)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_LpPhase(benchmark::State& state) {
  SimConfig c;
  c.horizon_pre = 50;
  c.horizon_lp = 50;
  c.retrain_period = static_cast<int>(state.range(0));
  const NetsimRun pre = generate_pre_network(c);
  for (auto _ : state) {
    auto policy = make_policy("homophily-boost");
    const NetsimRun run = run_lp_phase(pre, *policy, c);
    benchmark::DoNotOptimize(run.audit.size());
  }
}
BENCHMARK(BM_LpPhase)->Arg(0)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
