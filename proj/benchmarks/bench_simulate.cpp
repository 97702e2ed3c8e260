#include <benchmark/benchmark.h>

#include "homophily/simulate.hpp"

using namespace homophily;

namespace {

HawkesParams two_group() {
  Eigen::MatrixXd a(3, 3);
  a << 0.60, 0.00, 0.05,
       0.00, 0.40, 0.05,
       0.10, 0.10, 0.20;
  return HawkesParams(2, Eigen::Vector3d(0.8, 0.5, 0.2), a, 1.0);
}

void BM_SimulateTwoGroup(benchmark::State& state) {
  const HawkesParams p = two_group();
  const double horizon = static_cast<double>(state.range(0));
  std::uint64_t seed = 1;
  std::size_t events = 0;
  for (auto _ : state) {
    const EventLog log = simulate(p, horizon, seed++);
    events += log.size();
    benchmark::DoNotOptimize(log.events().data());
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateTwoGroup)->Arg(1000)->Arg(10000);

void BM_SimulateManyGroups(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int g = k * (k + 1) / 2;
  const Eigen::MatrixXd a = Eigen::MatrixXd::Constant(g, g, 0.5 / g);
  const HawkesParams p(k, Eigen::VectorXd::Constant(g, 0.1), a, 1.0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const EventLog log = simulate(p, 1000.0, seed++);
    benchmark::DoNotOptimize(log.size());
  }
}
BENCHMARK(BM_SimulateManyGroups)->Arg(3)->Arg(6);

}  // namespace
