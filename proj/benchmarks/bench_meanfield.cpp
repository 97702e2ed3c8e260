#include <benchmark/benchmark.h>

#include "homophily/meanfield.hpp"

using namespace homophily;

namespace {

void BM_SpectralRadius(benchmark::State& state) {
  const auto g = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd a = (Eigen::MatrixXd::Random(g, g).array().abs() * (0.9 / static_cast<double>(g))).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(spectral_radius(a, 1.0));
}
BENCHMARK(BM_SpectralRadius)->Arg(3)->Arg(21)->Arg(55);

void BM_IntegrateMeanField(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int g = k * (k + 1) / 2;
  const HawkesParams p(k, Eigen::VectorXd::Constant(g, 0.2), Eigen::MatrixXd::Constant(g, g, 0.5 / g), 1.0);
  for (auto _ : state) {
    const auto traj = integrate_meanfield(p, nullptr, 50.0, 0.01);
    benchmark::DoNotOptimize(traj.values.back().data());
  }
}
BENCHMARK(BM_IntegrateMeanField)->Arg(2)->Arg(5);

}  // namespace
