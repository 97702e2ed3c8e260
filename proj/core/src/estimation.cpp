#include "homophily/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "homophily/likelihood.hpp"

namespace homophily {

std::string_view to_string(FitStatus status) {
  switch (status) {
    case FitStatus::kOk: return "ok";
    case FitStatus::kLowData: return "low_data";
    case FitStatus::kNotConverged: return "not_converged";
    case FitStatus::kInvalidBaseline: return "invalid_baseline";
  }
  return "unknown";
}

Eigen::VectorXd DiagonalFit::mu_hat() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) out[static_cast<Eigen::Index>(p)] = pairs[p].mu;
  return out;
}

Eigen::VectorXd DiagonalFit::alpha_hat() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    out[static_cast<Eigen::Index>(p)] = pairs[p].alpha;
  }
  return out;
}

Eigen::VectorXd DiagonalFit::log_likelihood() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    out[static_cast<Eigen::Index>(p)] = pairs[p].log_likelihood;
  }
  return out;
}

bool DiagonalFit::all_ok() const {
  return std::all_of(pairs.begin(), pairs.end(),
                     [](const PairFit& p) { return p.status == FitStatus::kOk; });
}

namespace {

void check_window(const EventLog& log, const Window& window) {
  if (!(window.end > window.start)) throw std::invalid_argument("window must be non-empty");
  if (window.start < 0.0 || window.end > log.horizon()) {
    throw std::invalid_argument("window [" + std::to_string(window.start) + ", " +
                                std::to_string(window.end) + ") outside the log horizon");
  }
}

// Newton refinement of a 1-D concave maximum, kept inside [lo, hi] and only
// accepted while it does not lower the objective.
template <typename Objective, typename Derivs>
double polish(double x, double lo, double hi, Objective&& objective, Derivs&& derivs) {
  double fx = objective(x);
  for (int it = 0; it < 8; ++it) {
    const auto [slope, curvature] = derivs(x);
    if (!(curvature < 0.0) || !std::isfinite(slope)) break;
    const double next = std::clamp(x - slope / curvature, lo, hi);
    const double fnext = objective(next);
    if (!(fnext >= fx)) break;
    const bool done = std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x));
    x = next;
    fx = fnext;
    if (done) break;
  }
  return x;
}

}  // namespace

Eigen::VectorXd estimate_mu(const EventLog& log, const Window& window) {
  check_window(log, window);
  const auto counts = log.counts(window);
  Eigen::VectorXd mu(log.pairs());
  for (int p = 0; p < log.pairs(); ++p) {
    mu[p] = static_cast<double>(counts[static_cast<std::size_t>(p)]) / window.length();
  }
  return mu;
}

PairFit fit_pair(std::span<const double> times, double length, const EstimationOptions& options,
                 double fixed_mu) {
  if (!(options.beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const ExpHawkesLikelihood likelihood(times, length, options.beta);
  const double n = static_cast<double>(times.size());

  PairFit fit;
  fit.events = times.size();
  fit.mu = options.baseline == BaselineMode::kFixed ? fixed_mu : n / length;

  if (times.size() < options.min_events) {
    fit.status = FitStatus::kLowData;
    fit.alpha = 0.0;
    fit.at_boundary = true;
    fit.log_likelihood = times.empty() && fit.mu == 0.0 ? 0.0 : likelihood.value(fit.mu, 0.0);
    return fit;
  }
  if (options.baseline == BaselineMode::kFixed && !(fixed_mu > 0.0)) {
    fit.status = FitStatus::kInvalidBaseline;
    fit.alpha = 0.0;
    fit.log_likelihood = -std::numeric_limits<double>::infinity();
    return fit;
  }

  const double cap = options.beta * (1.0 - options.boundary_epsilon);
  const bool joint = options.baseline == BaselineMode::kJoint;
  const double mu_fixed = fit.mu;

  auto objective = [&](double alpha) {
    const double mu = joint ? likelihood.profile_mu(alpha) : mu_fixed;
    return likelihood.value(mu, alpha);
  };
  // Slope and curvature of the (profile) objective; for the profile the
  // curvature is the Schur complement L_aa - L_am^2 / L_mm.
  auto derivs = [&](double alpha) -> std::pair<double, double> {
    const double mu = joint ? likelihood.profile_mu(alpha) : mu_fixed;
    const auto d = likelihood.derivatives(mu, alpha);
    if (!joint) return {d.d_alpha, d.d_alpha_alpha};
    return {d.d_alpha, d.d_alpha_alpha - d.d_mu_alpha * d.d_mu_alpha / d.d_mu_mu};
  };

  const auto best = maximize_bounded(objective, 0.0, cap, options.tolerance,
                                     options.max_iterations);
  fit.iterations = best.iterations;
  double alpha = best.x;
  if (best.converged) alpha = polish(alpha, 0.0, cap, objective, derivs);

  // The bounded search never evaluates the endpoints themselves.
  double value = objective(alpha);
  for (double edge : {0.0, cap}) {
    const double v = objective(edge);
    if (v > value) {
      value = v;
      alpha = edge;
    }
  }

  fit.alpha = alpha;
  fit.mu = joint ? likelihood.profile_mu(alpha) : mu_fixed;
  fit.log_likelihood = value;
  fit.at_boundary = alpha <= 10.0 * options.tolerance || alpha >= cap - 10.0 * options.tolerance;
  fit.status = best.converged ? FitStatus::kOk : FitStatus::kNotConverged;
  return fit;
}

namespace {

DiagonalFit fit_window(const EventLog& log, const Window& window,
                       const EstimationOptions& options) {
  check_window(log, window);
  if (options.baseline == BaselineMode::kFixed && options.fixed_mu.size() != log.pairs()) {
    throw std::invalid_argument("fixed mu must have one entry per group pair");
  }
  DiagonalFit out;
  out.groups = log.groups();
  out.window = window;
  out.beta = options.beta;
  out.pairs.reserve(static_cast<std::size_t>(log.pairs()));
  for (int p = 0; p < log.pairs(); ++p) {
    std::vector<double> times = log.times(p, window);
    for (double& t : times) t -= window.start;
    const double fixed = options.baseline == BaselineMode::kFixed ? options.fixed_mu[p] : 0.0;
    out.pairs.push_back(fit_pair(times, window.length(), options, fixed));
  }
  return out;
}

}  // namespace

DiagonalFit estimate_alpha_diagonal(const EventLog& log, const Window& window,
                                    const EstimationOptions& options) {
  return fit_window(log, window, options);
}

std::vector<Window> windows_from_breakpoints(std::span<const double> breakpoints,
                                             double horizon) {
  std::vector<Window> windows;
  double start = 0.0;
  for (double b : breakpoints) {
    if (b == 0.0 && windows.empty()) continue;
    if (!(b > start) || b > horizon) {
      throw std::invalid_argument("breakpoints must be increasing and within the horizon");
    }
    if (b == horizon) break;
    windows.push_back({start, b});
    start = b;
  }
  windows.push_back({start, horizon});
  return windows;
}

Eigen::VectorXd tie_within_cross(const Eigen::VectorXd& mu, int groups) {
  const int g = pair_count(groups);
  if (mu.size() != g) throw std::invalid_argument("mu size does not match K");
  if (groups < 2) return mu;
  const double within = mu.head(groups).sum();
  const double cross = mu.tail(g - groups).sum();
  const double level = 0.5 * (within + cross);
  Eigen::VectorXd out(g);
  out.head(groups).setConstant(level / groups);
  out.tail(g - groups).setConstant(level / (g - groups));
  return out;
}

std::vector<DiagonalFit> estimate_windows(const EventLog& log, std::span<const Window> windows,
                                          const WindowedOptions& options) {
  EstimationOptions base = options.fit;
  if (options.baseline_window) {
    base.baseline = BaselineMode::kFixed;
    base.fixed_mu = estimate_mu(log, *options.baseline_window);
    if (options.tie_within_cross) base.fixed_mu = tie_within_cross(base.fixed_mu, log.groups());
  }

  std::vector<DiagonalFit> fits;
  fits.reserve(windows.size());
  for (const auto& window : windows) {
    EstimationOptions per_window = base;
    if (options.tie_within_cross && !options.baseline_window) {
      per_window.baseline = BaselineMode::kFixed;
      per_window.fixed_mu = tie_within_cross(estimate_mu(log, window), log.groups());
    }
    fits.push_back(fit_window(log, window, per_window));
  }
  return fits;
}

std::vector<DiagonalFit> estimate_windowed(const EventLog& log,
                                           std::span<const double> breakpoints,
                                           const WindowedOptions& options) {
  const auto windows = windows_from_breakpoints(breakpoints, log.horizon());
  return estimate_windows(log, windows, options);
}

}  // namespace homophily
