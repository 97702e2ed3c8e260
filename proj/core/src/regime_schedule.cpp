#include "homophily/regime_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "homophily/hawkes_params.hpp"

namespace homophily {

RegimeSchedule::RegimeSchedule(std::vector<double> starts,
                               std::vector<Eigen::MatrixXd> matrices)
    : starts_(std::move(starts)), matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw std::invalid_argument("schedule needs at least one matrix");
  if (starts_.size() != matrices_.size()) {
    throw std::invalid_argument("schedule needs exactly one matrix per interval");
  }
  if (starts_.front() != 0.0) throw std::invalid_argument("first interval must start at 0");
  for (std::size_t k = 1; k < starts_.size(); ++k) {
    if (!std::isfinite(starts_[k]) || !(starts_[k] > starts_[k - 1])) {
      throw std::invalid_argument("breakpoints must be finite and strictly increasing");
    }
  }
  const auto pairs = static_cast<int>(matrices_.front().rows());
  for (const auto& m : matrices_) validate_excitation(m, pairs, "regime matrix");
}

RegimeSchedule RegimeSchedule::from_breakpoints(std::span<const double> breakpoints,
                                                std::vector<Eigen::MatrixXd> matrices) {
  std::vector<double> starts{0.0};
  for (double b : breakpoints) {
    if (b == 0.0 && starts.size() == 1) continue;
    starts.push_back(b);
  }
  return RegimeSchedule(std::move(starts), std::move(matrices));
}

std::size_t RegimeSchedule::interval_at(double t) const {
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  if (it == starts_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(starts_.begin(), it) - 1);
}

void RegimeSchedule::validate_against(double horizon, int pairs) const {
  if (starts_.back() > horizon) {
    throw std::invalid_argument("last breakpoint " + std::to_string(starts_.back()) +
                                " exceeds horizon " + std::to_string(horizon));
  }
  if (this->pairs() != pairs) {
    throw std::invalid_argument("schedule matrices do not match the number of group pairs");
  }
}

}  // namespace homophily
