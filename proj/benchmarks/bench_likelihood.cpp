#include <benchmark/benchmark.h>

#include "homophily/estimation.hpp"
#include "homophily/likelihood.hpp"
#include "homophily/simulate.hpp"

using namespace homophily;

namespace {

std::vector<double> sample_times(double horizon) {
  const HawkesParams p(1, Eigen::VectorXd::Constant(1, 0.5), Eigen::MatrixXd::Constant(1, 1, 0.5), 1.0);
  return simulate(p, horizon, 9).times(0, {0.0, horizon});
}

void BM_LikelihoodValue(benchmark::State& state) {
  const double horizon = static_cast<double>(state.range(0));
  const auto times = sample_times(horizon);
  const ExpHawkesLikelihood l(times, horizon, 1.0);
  double alpha = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(l.value(0.5, alpha));
    alpha = alpha > 0.6 ? 0.3 : alpha + 1e-3;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * times.size()));
}
BENCHMARK(BM_LikelihoodValue)->Arg(1000)->Arg(20000);

void BM_FitPair(benchmark::State& state) {
  const double horizon = static_cast<double>(state.range(0));
  const auto times = sample_times(horizon);
  for (auto _ : state) benchmark::DoNotOptimize(fit_pair(times, horizon, {}).alpha);
}
BENCHMARK(BM_FitPair)->Arg(1000)->Arg(20000);

}  // namespace
