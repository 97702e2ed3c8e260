#pragma once

#include <Eigen/Dense>

#include "homophily/event_log.hpp"
#include "homophily/hawkes_params.hpp"
#include "homophily/regime_schedule.hpp"

namespace homophily {

/// How a change of excitation matrix at a breakpoint treats past events.
enum class RegimeMode {
  /// Past events keep decaying but are weighted by the matrix in force now.
  kReweightPast,
  /// Each event keeps the matrix that was in force when it occurred.
  kFutureOnly,
};

/// Conditional intensity lambda(t) by direct summation over events with s < t.
/// O(events * G); used as the reference evaluation.
Eigen::VectorXd intensity_at(const HawkesParams& params, const EventLog& log, double t);

/// Same, with a piecewise-constant excitation schedule replacing params.excitation().
Eigen::VectorXd intensity_at(const HawkesParams& params, const RegimeSchedule& schedule,
                             RegimeMode mode, const EventLog& log, double t);

/// Running excitation for exponential kernels.
///
/// Keeps per-source decayed counts S_m(t) = sum_{s<t, mark m} e^{-beta (t-s)} and,
/// in kFutureOnly mode, the per-(target, source) excitation R already weighted by
/// the emission-time matrix. Advancing by dt multiplies the state by e^{-beta dt}.
class ExcitationState {
 public:
  ExcitationState(int pairs, double beta, RegimeMode mode = RegimeMode::kReweightPast);

  double time() const noexcept { return time_; }

  /// Decays the state to time t >= time().
  void advance_to(double t);

  /// Registers an event of `mark` at the current time, emitted under `excitation`.
  void record(int mark, const Eigen::MatrixXd& excitation);

  /// lambda at the current time with `excitation` in force.
  Eigen::VectorXd intensity(const Eigen::VectorXd& mu,
                            const Eigen::MatrixXd& excitation) const;

 private:
  double beta_;
  RegimeMode mode_;
  double time_ = 0.0;
  Eigen::VectorXd source_;
  Eigen::MatrixXd weighted_;
};

}  // namespace homophily
