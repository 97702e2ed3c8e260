#include "homophily/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "homophily/rng.hpp"

namespace homophily {

NonStationaryError::NonStationaryError(double spectral_radius)
    : std::domain_error("no stationary mean exists: rho(A/beta) = " +
                        std::to_string(spectral_radius)),
      spectral_radius_(spectral_radius) {}

IllConditionedError::IllConditionedError(double condition)
    : std::runtime_error("I - A/beta is ill-conditioned (condition number " +
                         std::to_string(condition) + ")"),
      condition_(condition) {}

std::string_view to_string(StabilityRegime regime) {
  switch (regime) {
    case StabilityRegime::kSubcritical: return "subcritical";
    case StabilityRegime::kCritical: return "critical";
    case StabilityRegime::kSupercritical: return "supercritical";
  }
  return "unknown";
}

StabilityRegime classify(double spectral_radius) {
  if (std::abs(spectral_radius - 1.0) <= kCriticalBand) return StabilityRegime::kCritical;
  return spectral_radius < 1.0 ? StabilityRegime::kSubcritical
                               : StabilityRegime::kSupercritical;
}

namespace {

struct PowerRun {
  double estimate;
  bool converged;
};

PowerRun power_iterate(const Eigen::MatrixXd& shifted, Eigen::VectorXd x, int iterations,
                       double tolerance) {
  x /= x.norm();
  double previous = 0.0;
  double previous_delta = std::numeric_limits<double>::infinity();
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd y = shifted * x;
    estimate = y.norm();
    if (estimate == 0.0) return {0.0, true};
    x = y / estimate;
    const double delta = std::abs(estimate - previous);
    if (it > 1) {
      if (delta == 0.0) return {estimate, true};
      // Geometric extrapolation of the remaining error.
      const double ratio = delta / previous_delta;
      if (ratio < 1.0) {
        const double remaining = delta * ratio / (1.0 - ratio);
        if (remaining <= tolerance * estimate && delta <= tolerance * estimate) {
          return {estimate, true};
        }
      }
    }
    previous_delta = delta;
    previous = estimate;
  }
  return {estimate, false};
}

}  // namespace

double spectral_radius(const Eigen::MatrixXd& excitation, double beta,
                       const PowerIterationOptions& options) {
  if (excitation.rows() != excitation.cols()) {
    throw std::invalid_argument("excitation matrix must be square");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if ((excitation.array() < 0.0).any()) {
    throw std::invalid_argument("power iteration requires a nonnegative matrix");
  }
  const Eigen::MatrixXd scaled = excitation / beta;
  const double shift = scaled.rowwise().sum().maxCoeff();
  if (excitation.size() == 0 || shift == 0.0) return 0.0;

  Eigen::MatrixXd shifted = scaled;
  shifted.diagonal().array() += shift;

  const int half = std::max(1, options.max_iterations / 2);
  auto run = power_iterate(shifted, Eigen::VectorXd::Ones(scaled.rows()), half,
                           options.relative_tolerance);
  if (!run.converged) {
    // Restart from a random positive vector.
    Xoshiro256 rng(0x5EED);
    Eigen::VectorXd start(scaled.rows());
    for (Eigen::Index i = 0; i < start.size(); ++i) start[i] = 0.5 + rng.uniform();
    run = power_iterate(shifted, start, options.max_iterations - half,
                        options.relative_tolerance);
  }
  if (run.converged) return std::max(0.0, run.estimate - shift);

  // Strongly non-normal matrices (large off-diagonal couplings, Jordan-like
  // blocks) converge too slowly; fall back to a dense eigensolve.
  const Eigen::EigenSolver<Eigen::MatrixXd> eig(scaled, false);
  if (eig.info() != Eigen::Success) {
    throw ConvergenceError("power iteration did not converge within " +
                           std::to_string(options.max_iterations) + " iterations");
  }
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

Eigen::VectorXd solve_stationary(const Eigen::MatrixXd& excitation, const Eigen::VectorXd& mu,
                                 double beta, double* condition_out) {
  const Eigen::Index g = excitation.rows();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(g, g) - excitation / beta;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(system);
  const auto& sv = svd.singularValues();
  const double condition = sv[sv.size() - 1] > 0.0
                               ? sv[0] / sv[sv.size() - 1]
                               : std::numeric_limits<double>::infinity();
  if (condition_out != nullptr) *condition_out = condition;
  if (condition > kMaxCondition) throw IllConditionedError(condition);
  return system.partialPivLu().solve(mu);
}

}  // namespace

Eigen::VectorXd stationary_intensity(const HawkesParams& params) {
  const double rho = spectral_radius(params.excitation(), params.beta());
  if (classify(rho) != StabilityRegime::kSubcritical) throw NonStationaryError(rho);
  return solve_stationary(params.excitation(), params.mu(), params.beta(), nullptr);
}

StabilityReport analyze_stability(const HawkesParams& params) {
  StabilityReport report;
  report.spectral_radius = spectral_radius(params.excitation(), params.beta());
  report.regime = classify(report.spectral_radius);
  if (report.regime == StabilityRegime::kSubcritical) {
    report.kappa_bound = params.beta() * (1.0 - report.spectral_radius);
    double condition = 0.0;
    report.stationary =
        solve_stationary(params.excitation(), params.mu(), params.beta(), &condition);
    report.condition = condition;
  }
  return report;
}

double default_step(double beta) { return std::min(0.01, 0.1 / beta); }

MeanFieldTrajectory integrate_meanfield(const HawkesParams& params,
                                        const RegimeSchedule* schedule, double horizon,
                                        double step) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be positive");
  }
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");

  MeanFieldTrajectory out;
  out.mu = params.mu();
  out.beta = params.beta();
  if (schedule != nullptr) {
    schedule->validate_against(horizon, params.pairs());
    for (std::size_t k = 0; k < schedule->intervals(); ++k) {
      const double start = schedule->starts()[k];
      if (start >= horizon) break;
      out.interval_starts.push_back(start);
      out.matrices.push_back(schedule->matrix(k));
    }
  } else {
    out.interval_starts.push_back(0.0);
    out.matrices.push_back(params.excitation());
  }

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < out.interval_starts.size(); ++k) {
    const double end = k + 1 < out.interval_starts.size() ? out.interval_starts[k + 1] : horizon;
    min_gap = std::min(min_gap, end - out.interval_starts[k]);
  }
  if (step >= min_gap) {
    throw std::invalid_argument("step must be smaller than the shortest regime interval");
  }

  const Eigen::VectorXd forcing = params.beta() * params.mu();
  Eigen::VectorXd state = params.mu();
  out.times.push_back(0.0);
  out.values.push_back(state);

  for (std::size_t k = 0; k < out.interval_starts.size(); ++k) {
    const double start = out.interval_starts[k];
    const double end = k + 1 < out.interval_starts.size() ? out.interval_starts[k + 1] : horizon;
    out.interval_offsets.push_back(out.times.size() - 1);

    Eigen::MatrixXd drift = out.matrices[k];
    drift.diagonal().array() -= params.beta();
    auto rhs = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd { return drift * y + forcing; };

    const auto steps = static_cast<long>(std::ceil((end - start) / step - 1e-9));
    const double h = (end - start) / static_cast<double>(steps);
    for (long n = 1; n <= steps; ++n) {
      const Eigen::VectorXd k1 = rhs(state);
      const Eigen::VectorXd k2 = rhs(state + 0.5 * h * k1);
      const Eigen::VectorXd k3 = rhs(state + 0.5 * h * k2);
      const Eigen::VectorXd k4 = rhs(state + h * k3);
      state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      out.times.push_back(n == steps ? end : start + static_cast<double>(n) * h);
      out.values.push_back(state);
    }
  }
  return out;
}

BoundCheck verify_convergence_bound(const MeanFieldTrajectory& trajectory, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("safety must be in (0, 1]");
  BoundCheck check;
  const std::size_t intervals = trajectory.interval_starts.size();
  for (std::size_t k = 0; k < intervals; ++k) {
    const auto& excitation = trajectory.matrices[k];
    const double rho = spectral_radius(excitation, trajectory.beta);
    if (classify(rho) != StabilityRegime::kSubcritical) throw NonStationaryError(rho);
    const Eigen::VectorXd target =
        solve_stationary(excitation, trajectory.mu, trajectory.beta, nullptr);

    BoundInterval info;
    info.start = trajectory.interval_starts[k];
    info.spectral_radius = rho;
    info.kappa = safety * trajectory.beta * (1.0 - rho);

    const std::size_t first = trajectory.interval_offsets[k];
    const bool last = k + 1 == intervals;
    const std::size_t stop = last ? trajectory.times.size() : trajectory.interval_offsets[k + 1];
    info.end = last ? trajectory.times.back() : trajectory.times[stop];
    const double initial = (trajectory.values[first] - target).norm();
    info.vacuous = initial == 0.0;

    for (std::size_t n = first; n < stop; ++n) {
      const double dt = trajectory.times[n] - info.start;
      const double bound = std::exp(-info.kappa * dt);
      const double ratio = info.vacuous ? 0.0 : (trajectory.values[n] - target).norm() / initial;
      const bool ok = ratio <= bound * (1.0 + 1e-12) + 1e-14;
      info.passed = info.passed && ok;
      info.empirical_constant = std::max(info.empirical_constant, ratio / bound);
      check.times.push_back(trajectory.times[n]);
      check.normalized.push_back(ratio);
      check.bound.push_back(bound);
      check.margin.push_back(bound - ratio);
      check.interval_of.push_back(k);
    }
    check.passed = check.passed && info.passed;
    check.intervals.push_back(info);
  }
  return check;
}

}  // namespace homophily
