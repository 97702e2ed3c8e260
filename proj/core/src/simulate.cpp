#include "homophily/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "homophily/rng.hpp"

namespace homophily {

namespace {

int sample_mark(const Eigen::VectorXd& lambda, double total, double u) {
  double target = u * total;
  const auto last = static_cast<int>(lambda.size()) - 1;
  for (int p = 0; p < last; ++p) {
    if (target < lambda[p]) return p;
    target -= lambda[p];
  }
  return last;
}

}  // namespace

EventLog simulate(const HawkesParams& params, const RegimeSchedule* schedule, double horizon,
                  std::uint64_t seed, RegimeMode mode) {
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw std::invalid_argument("simulation horizon must be positive");
  }
  if (schedule != nullptr) schedule->validate_against(horizon, params.pairs());

  EventLog log(params.groups(), horizon);
  Xoshiro256 rng(seed);
  ExcitationState state(params.pairs(), params.beta(), mode);

  std::size_t interval = 0;
  const std::size_t intervals = schedule != nullptr ? schedule->intervals() : 1;
  auto current_matrix = [&]() -> const Eigen::MatrixXd& {
    return schedule != nullptr ? schedule->matrix(interval) : params.excitation();
  };
  auto interval_end = [&] {
    return schedule != nullptr ? schedule->interval_end(interval, horizon) : horizon;
  };

  double t = 0.0;
  while (t < horizon) {
    const Eigen::MatrixXd& excitation = current_matrix();
    const double bound = state.intensity(params.mu(), excitation).sum();
    const double end = std::min(interval_end(), horizon);

    double candidate = end;
    if (bound > 0.0) candidate = t + rng.exponential(bound);

    if (candidate >= end) {
      t = end;
      state.advance_to(t);
      if (interval + 1 < intervals) ++interval;
      else if (t >= horizon) break;
      continue;
    }

    t = candidate;
    state.advance_to(t);
    const Eigen::VectorXd lambda = state.intensity(params.mu(), excitation);
    const double total = lambda.sum();
    if (rng.uniform() * bound <= total) {
      const int mark = sample_mark(lambda, total, rng.uniform());
      log.append(t, mark);
      state.record(mark, excitation);
    }
  }
  return log;
}

}  // namespace homophily
