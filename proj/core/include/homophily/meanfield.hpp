#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "homophily/hawkes_params.hpp"
#include "homophily/regime_schedule.hpp"

namespace homophily {

/// Raised when rho(A / beta) >= 1 (within the critical band counts as >= 1).
class NonStationaryError : public std::domain_error {
 public:
  explicit NonStationaryError(double spectral_radius);
  double spectral_radius() const noexcept { return spectral_radius_; }

 private:
  double spectral_radius_;
};

/// Raised when I - A / beta is too ill-conditioned for a trustworthy solve.
class IllConditionedError : public std::runtime_error {
 public:
  explicit IllConditionedError(double condition);
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Raised when power iteration fails to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StabilityRegime { kSubcritical, kCritical, kSupercritical };
std::string_view to_string(StabilityRegime regime);

inline constexpr double kCriticalBand = 1e-9;
inline constexpr double kMaxCondition = 1e12;

struct PowerIterationOptions {
  double relative_tolerance = 1e-10;
  int max_iterations = 10000;
};

/// rho(A / beta) by shifted power iteration on the nonnegative matrix.
///
/// Iterates x <- (M + s I) x with M = A / beta and s = ||M||_inf, which makes
/// the Perron root strictly dominant and keeps the estimate exactly homogeneous
/// in A. Stops when the extrapolated error falls below the relative tolerance.
/// Falls back to a dense eigensolve when iteration stalls.
double spectral_radius(const Eigen::MatrixXd& excitation, double beta,
                       const PowerIterationOptions& options = {});

/// Solves (I - A / beta) lambda* = mu.
/// Throws NonStationaryError if rho >= 1 - kCriticalBand, IllConditionedError
/// if the condition number exceeds kMaxCondition.
Eigen::VectorXd stationary_intensity(const HawkesParams& params);

struct StabilityReport {
  double spectral_radius = 0.0;
  StabilityRegime regime = StabilityRegime::kSubcritical;
  std::optional<double> kappa_bound;          // beta (1 - rho), subcritical only
  std::optional<Eigen::VectorXd> stationary;  // subcritical only
  std::optional<double> condition;            // of I - A / beta when solved
};

StabilityRegime classify(double spectral_radius);

/// Spectral radius, regime, rate bound and stationary mean in one report.
/// Never throws NonStationaryError; throws IllConditionedError.
StabilityReport analyze_stability(const HawkesParams& params);

/// Sampled solution of d lambda / dt = (A(t) - beta I) lambda + beta mu, lambda(0) = mu.
struct MeanFieldTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;
  Eigen::VectorXd mu;
  double beta = 1.0;
  std::vector<double> interval_starts;       // regime starts, first is 0
  std::vector<Eigen::MatrixXd> matrices;     // excitation per interval
  std::vector<std::size_t> interval_offsets; // index into times where each interval begins
};

/// Classical fixed-step RK4, stepping exactly onto each breakpoint. The step is
/// shrunk per interval so that an integer number of steps covers it.
/// Throws std::invalid_argument for step <= 0, horizon <= 0 or a step that is
/// not smaller than the shortest interval.
MeanFieldTrajectory integrate_meanfield(const HawkesParams& params,
                                        const RegimeSchedule* schedule, double horizon,
                                        double step);

/// min(0.01, 0.1 / beta)
double default_step(double beta);

struct BoundInterval {
  double start = 0.0;
  double end = 0.0;
  double spectral_radius = 0.0;
  double kappa = 0.0;  // safety * beta * (1 - rho)
  bool vacuous = false;  // started exactly at equilibrium
  bool passed = true;
  double empirical_constant = 0.0;  // max_t ratio * e^{kappa (t - start)}
};

struct BoundCheck {
  bool passed = true;
  std::vector<BoundInterval> intervals;
  std::vector<double> times;
  std::vector<double> normalized;  // ||l(t) - l*_k|| / ||l(tau_k) - l*_k||
  std::vector<double> bound;       // e^{-kappa_k (t - tau_k)}
  std::vector<double> margin;      // bound - normalized
  std::vector<std::size_t> interval_of;
};

/// Checks ||l(t) - l*_k|| <= e^{-kappa_k (t - tau_k)} ||l(tau_k) - l*_k|| on every
/// interval with kappa_k = safety * beta * (1 - rho_k) (Euclidean norm, C = 1).
/// Throws NonStationaryError if an interval is not subcritical.
BoundCheck verify_convergence_bound(const MeanFieldTrajectory& trajectory,
                                    double safety = 0.9);

}  // namespace homophily
