#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "homophily/event_log.hpp"

namespace homophily {

enum class FitStatus {
  kOk,
  kLowData,          // fewer than min_events in the window; alpha fixed to 0
  kNotConverged,     // optimiser hit max_iterations
  kInvalidBaseline,  // fixed mu = 0 with events present: likelihood is -inf
};

std::string_view to_string(FitStatus status);

/// How the baseline mu is obtained for each pair.
enum class BaselineMode {
  kJoint,       // maximise over (mu, alpha)
  kClosedForm,  // mu = N / T on the same window, alpha maximised given mu
  kFixed,       // mu supplied by the caller
};

struct PairFit {
  double mu = 0.0;
  double alpha = 0.0;
  double log_likelihood = 0.0;
  std::size_t events = 0;
  FitStatus status = FitStatus::kOk;
  bool at_boundary = false;  // alpha ended on 0 or on the subcritical cap
  int iterations = 0;
};

/// Per-pair univariate fits on one window under the diagonal-excitation assumption.
struct DiagonalFit {
  int groups = 0;
  Window window;
  double beta = 1.0;
  std::vector<PairFit> pairs;

  Eigen::VectorXd mu_hat() const;
  Eigen::VectorXd alpha_hat() const;
  Eigen::VectorXd log_likelihood() const;
  bool all_ok() const;
};

struct EstimationOptions {
  double beta = 1.0;
  BaselineMode baseline = BaselineMode::kJoint;
  Eigen::VectorXd fixed_mu;  // read when baseline == kFixed
  std::size_t min_events = 5;
  double tolerance = 1e-7;
  int max_iterations = 200;
  double boundary_epsilon = 1e-6;  // alpha <= beta (1 - epsilon)
};

/// Closed-form baseline N_p / (end - start), counting events in [start, end).
/// Throws std::invalid_argument for an empty window or one outside the horizon.
Eigen::VectorXd estimate_mu(const EventLog& log, const Window& window);

/// Fits one pair's event times (already shifted to [0, length)).
PairFit fit_pair(std::span<const double> times, double length,
                 const EstimationOptions& options, double fixed_mu = 0.0);

DiagonalFit estimate_alpha_diagonal(const EventLog& log, const Window& window,
                                    const EstimationOptions& options = {});

struct WindowedOptions {
  EstimationOptions fit;
  /// Hold mu fixed at N/T measured on this window (e.g. a pre-intervention phase).
  std::optional<Window> baseline_window;
  /// Rebalance mu so the within-group and cross-group totals are equal.
  bool tie_within_cross = false;
};

/// Windows [0, b_1), [b_1, b_2), ..., [b_m, horizon) from interior breakpoints.
std::vector<Window> windows_from_breakpoints(std::span<const double> breakpoints,
                                             double horizon);

std::vector<DiagonalFit> estimate_windowed(const EventLog& log,
                                           std::span<const double> breakpoints,
                                           const WindowedOptions& options = {});

std::vector<DiagonalFit> estimate_windows(const EventLog& log, std::span<const Window> windows,
                                          const WindowedOptions& options = {});

/// Splits the within total and the cross total evenly so both equal their mean,
/// spreading each total uniformly over its pairs. K = 1 is returned unchanged.
Eigen::VectorXd tie_within_cross(const Eigen::VectorXd& mu, int groups);

}  // namespace homophily
