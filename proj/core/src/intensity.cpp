#include "homophily/intensity.hpp"

#include <cmath>
#include <stdexcept>

namespace homophily {

Eigen::VectorXd intensity_at(const HawkesParams& params, const EventLog& log, double t) {
  Eigen::VectorXd lambda = params.mu();
  const auto& a = params.excitation();
  for (const auto& e : log.events()) {
    if (e.t >= t) break;
    lambda += a.col(e.mark) * std::exp(-params.beta() * (t - e.t));
  }
  return lambda;
}

Eigen::VectorXd intensity_at(const HawkesParams& params, const RegimeSchedule& schedule,
                             RegimeMode mode, const EventLog& log, double t) {
  Eigen::VectorXd lambda = params.mu();
  const auto& now = schedule.matrix_at(t);
  for (const auto& e : log.events()) {
    if (e.t >= t) break;
    const auto& a = mode == RegimeMode::kReweightPast ? now : schedule.matrix_at(e.t);
    lambda += a.col(e.mark) * std::exp(-params.beta() * (t - e.t));
  }
  return lambda;
}

ExcitationState::ExcitationState(int pairs, double beta, RegimeMode mode)
    : beta_(beta), mode_(mode), source_(Eigen::VectorXd::Zero(pairs)) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (mode_ == RegimeMode::kFutureOnly) weighted_ = Eigen::MatrixXd::Zero(pairs, pairs);
}

void ExcitationState::advance_to(double t) {
  if (t < time_) throw std::invalid_argument("excitation state cannot move backwards");
  const double decay = std::exp(-beta_ * (t - time_));
  source_ *= decay;
  if (mode_ == RegimeMode::kFutureOnly) weighted_ *= decay;
  time_ = t;
}

void ExcitationState::record(int mark, const Eigen::MatrixXd& excitation) {
  source_[mark] += 1.0;
  if (mode_ == RegimeMode::kFutureOnly) weighted_.col(mark) += excitation.col(mark);
}

Eigen::VectorXd ExcitationState::intensity(const Eigen::VectorXd& mu,
                                           const Eigen::MatrixXd& excitation) const {
  if (mode_ == RegimeMode::kFutureOnly) return mu + weighted_.rowwise().sum();
  return mu + excitation * source_;
}

}  // namespace homophily
