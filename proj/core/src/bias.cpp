#include "homophily/bias.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace homophily {

Aggregate aggregate_pairs(const Eigen::VectorXd& per_pair, int groups) {
  if (per_pair.size() != pair_count(groups)) {
    throw std::invalid_argument("per-pair vector does not match K");
  }
  Aggregate out;
  out.within = per_pair.head(groups).sum();
  out.cross = per_pair.tail(per_pair.size() - groups).sum();
  return out;
}

std::optional<double> instantaneous_bias(double lambda_within, double lambda_cross) {
  if (!std::isfinite(lambda_within) || !std::isfinite(lambda_cross) || lambda_within < 0.0 ||
      lambda_cross < 0.0) {
    throw std::invalid_argument("intensities must be finite and nonnegative");
  }
  const double total = lambda_within + lambda_cross;
  if (total == 0.0) return std::nullopt;
  return lambda_within / total;
}

std::optional<double> instantaneous_bias(const Eigen::VectorXd& per_pair, int groups) {
  const auto agg = aggregate_pairs(per_pair, groups);
  return instantaneous_bias(agg.within, agg.cross);
}

std::vector<std::optional<double>> empirical_bias(const EventLog& log,
                                                  std::span<const double> times) {
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("bias grid must be sorted");
  }
  const PairIndex index = log.index();
  std::vector<std::optional<double>> out;
  out.reserve(times.size());
  const auto events = log.events();
  std::size_t next = 0;
  std::size_t within = 0;
  std::size_t cross = 0;
  for (double t : times) {
    while (next < events.size() && events[next].t <= t) {
      if (index.is_within(events[next].mark)) ++within;
      else ++cross;
      ++next;
    }
    if (within + cross == 0) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(static_cast<double>(within) / static_cast<double>(within + cross));
    }
  }
  return out;
}

double stationary_bias(const HawkesParams& params) {
  const auto lambda = stationary_intensity(params);
  const auto b = instantaneous_bias(lambda, params.groups());
  if (!b) throw std::domain_error("stationary bias undefined: all stationary rates are zero");
  return *b;
}

Eigen::VectorXd stationary_intensity(const DiagonalFit& fit, bool tie_mu) {
  Eigen::VectorXd mu = fit.mu_hat();
  if (tie_mu) mu = tie_within_cross(mu, fit.groups);
  const Eigen::VectorXd alpha = fit.alpha_hat();
  const double rho = alpha.size() > 0 ? alpha.maxCoeff() / fit.beta : 0.0;
  if (classify(rho) != StabilityRegime::kSubcritical) throw NonStationaryError(rho);
  return (mu.array() / (1.0 - alpha.array() / fit.beta)).matrix();
}

double stationary_bias(const DiagonalFit& fit, bool tie_mu) {
  const auto b = instantaneous_bias(stationary_intensity(fit, tie_mu), fit.groups);
  if (!b) throw std::domain_error("stationary bias undefined: all stationary rates are zero");
  return *b;
}

std::string_view to_string(BiasSource source) {
  switch (source) {
    case BiasSource::kModelTrue: return "model_true";
    case BiasSource::kMeanField: return "mean_field";
    case BiasSource::kWindowEstimated: return "window_estimated";
  }
  return "unknown";
}

BiasSeries window_bias_series(const EventLog& log, std::span<const DiagonalFit> fits,
                              std::span<const double> times, bool tie_mu) {
  BiasSeries series;
  series.source = BiasSource::kWindowEstimated;
  series.times.assign(times.begin(), times.end());
  series.b_emp = empirical_bias(log, times);

  std::vector<std::optional<double>> per_fit;
  per_fit.reserve(fits.size());
  for (const auto& fit : fits) {
    try {
      per_fit.emplace_back(instantaneous_bias(stationary_intensity(fit, tie_mu), fit.groups));
    } catch (const NonStationaryError&) {
      per_fit.emplace_back(std::nullopt);
    }
  }
  for (double t : times) {
    std::optional<double> value;
    for (std::size_t k = 0; k < fits.size(); ++k) {
      const auto& w = fits[k].window;
      const bool last_edge = k + 1 == fits.size() && t == w.end;
      if (w.contains(t) || last_edge) {
        value = per_fit[k];
        break;
      }
    }
    series.b_inst.push_back(value);
  }
  return series;
}

BiasSeries meanfield_bias_series(const EventLog& log, const MeanFieldTrajectory& trajectory,
                                 std::span<const double> times) {
  BiasSeries series;
  series.source = BiasSource::kMeanField;
  series.times.assign(times.begin(), times.end());
  series.b_emp = empirical_bias(log, times);
  const int groups = log.groups();
  const auto& grid = trajectory.times;
  for (double t : times) {
    if (grid.empty() || t < grid.front() || t > grid.back()) {
      series.b_inst.emplace_back(std::nullopt);
      continue;
    }
    const auto it = std::lower_bound(grid.begin(), grid.end(), t);
    const auto hi = static_cast<std::size_t>(std::distance(grid.begin(), it));
    Eigen::VectorXd lambda;
    if (hi == 0 || grid[hi] == t) {
      lambda = trajectory.values[hi];
    } else {
      const double w = (t - grid[hi - 1]) / (grid[hi] - grid[hi - 1]);
      lambda = (1.0 - w) * trajectory.values[hi - 1] + w * trajectory.values[hi];
    }
    series.b_inst.push_back(instantaneous_bias(lambda, groups));
  }
  return series;
}

BiasSeries conditional_bias_series(const EventLog& log, const HawkesParams& params,
                                   const RegimeSchedule* schedule, RegimeMode mode,
                                   std::span<const double> times) {
  BiasSeries series;
  series.source = BiasSource::kModelTrue;
  series.times.assign(times.begin(), times.end());
  series.b_emp = empirical_bias(log, times);

  // Running recursion over the log; evaluation at t uses events with s < t.
  ExcitationState state(params.pairs(), params.beta(), mode);
  const auto events = log.events();
  std::size_t next = 0;
  auto matrix_at = [&](double t) -> const Eigen::MatrixXd& {
    return schedule != nullptr ? schedule->matrix_at(t) : params.excitation();
  };
  for (double t : times) {
    while (next < events.size() && events[next].t < t) {
      state.advance_to(events[next].t);
      state.record(events[next].mark, matrix_at(events[next].t));
      ++next;
    }
    state.advance_to(std::max(t, state.time()));
    series.b_inst.push_back(
        instantaneous_bias(state.intensity(params.mu(), matrix_at(t)), params.groups()));
  }
  return series;
}

void ParityCounts::add(bool same_group, bool positive, std::size_t count) {
  if (same_group) {
    same_total += count;
    if (positive) same_positive += count;
  } else {
    cross_total += count;
    if (positive) cross_positive += count;
  }
}

ParityCounts& ParityCounts::operator+=(const ParityCounts& other) {
  same_positive += other.same_positive;
  same_total += other.same_total;
  cross_positive += other.cross_positive;
  cross_total += other.cross_total;
  return *this;
}

std::optional<double> ParityCounts::gap() const {
  if (same_total == 0 || cross_total == 0) return std::nullopt;
  const double same = static_cast<double>(same_positive) / static_cast<double>(same_total);
  const double cross = static_cast<double>(cross_positive) / static_cast<double>(cross_total);
  return std::abs(same - cross);
}

std::optional<double> demographic_parity_gap(std::span<const PairPrediction> predictions,
                                             std::span<const int> groups) {
  ParityCounts counts;
  for (const auto& p : predictions) {
    if (p.u < 0 || p.v < 0 || static_cast<std::size_t>(p.u) >= groups.size() ||
        static_cast<std::size_t>(p.v) >= groups.size()) {
      throw std::out_of_range("prediction references an unknown node");
    }
    counts.add(groups[static_cast<std::size_t>(p.u)] == groups[static_cast<std::size_t>(p.v)],
               p.positive);
  }
  return counts.gap();
}

}  // namespace homophily
