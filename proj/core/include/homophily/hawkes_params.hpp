#pragma once

#include <Eigen/Dense>

#include "homophily/group_pair.hpp"

namespace homophily {

/// Parameters of a group-pair Hawkes process with exponential kernels
/// phi(t) = A e^{-beta t}.
///
/// `mu` and the rows/columns of `A` follow PairIndex ordering. Row = target
/// pair, column = source pair. Immutable after construction.
class HawkesParams {
 public:
  HawkesParams(int groups, Eigen::VectorXd mu, Eigen::MatrixXd excitation, double beta);

  /// Diagonal excitation: A = diag(alpha).
  static HawkesParams diagonal(int groups, const Eigen::VectorXd& mu,
                               const Eigen::VectorXd& alpha, double beta);

  int groups() const noexcept { return groups_; }
  int pairs() const noexcept { return static_cast<int>(mu_.size()); }
  const Eigen::VectorXd& mu() const noexcept { return mu_; }
  const Eigen::MatrixXd& excitation() const noexcept { return excitation_; }
  double beta() const noexcept { return beta_; }
  PairIndex index() const { return PairIndex(groups_); }

  /// Same baseline and decay with a different excitation matrix.
  HawkesParams with_excitation(Eigen::MatrixXd excitation) const;

 private:
  int groups_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd excitation_;
  double beta_;
};

/// Throws std::invalid_argument unless `m` is `pairs` x `pairs`, finite and nonnegative.
void validate_excitation(const Eigen::MatrixXd& m, int pairs, const char* label);

}  // namespace homophily
