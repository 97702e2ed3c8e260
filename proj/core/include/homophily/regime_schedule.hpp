#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace homophily {

/// Piecewise-constant excitation: matrix k applies on [starts[k], starts[k+1]),
/// the last one until the end of the horizon. starts[0] is always 0.
class RegimeSchedule {
 public:
  RegimeSchedule(std::vector<double> starts, std::vector<Eigen::MatrixXd> matrices);

  /// Builds a schedule from interior breakpoints (0 is implied).
  static RegimeSchedule from_breakpoints(std::span<const double> breakpoints,
                                         std::vector<Eigen::MatrixXd> matrices);

  std::size_t intervals() const noexcept { return matrices_.size(); }
  const std::vector<double>& starts() const noexcept { return starts_; }
  const std::vector<Eigen::MatrixXd>& matrices() const noexcept { return matrices_; }
  const Eigen::MatrixXd& matrix(std::size_t k) const { return matrices_.at(k); }
  int pairs() const noexcept { return static_cast<int>(matrices_.front().rows()); }

  /// Index of the interval containing t (t >= 0).
  std::size_t interval_at(double t) const;
  const Eigen::MatrixXd& matrix_at(double t) const { return matrices_[interval_at(t)]; }

  /// End of interval k given the overall horizon.
  double interval_end(std::size_t k, double horizon) const {
    return k + 1 < starts_.size() ? starts_[k + 1] : horizon;
  }

  /// Throws std::invalid_argument if the last breakpoint exceeds the horizon
  /// or the matrices do not match `pairs`.
  void validate_against(double horizon, int pairs) const;

 private:
  std::vector<double> starts_;
  std::vector<Eigen::MatrixXd> matrices_;
};

}  // namespace homophily
