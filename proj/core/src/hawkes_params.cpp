#include "homophily/hawkes_params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace homophily {

void validate_excitation(const Eigen::MatrixXd& m, int pairs, const char* label) {
  if (m.rows() != pairs || m.cols() != pairs) {
    throw std::invalid_argument(std::string(label) + " must be " + std::to_string(pairs) +
                                "x" + std::to_string(pairs) + ", got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(std::string(label) +
                                    " entries must be finite and nonnegative");
      }
    }
  }
}

HawkesParams::HawkesParams(int groups, Eigen::VectorXd mu, Eigen::MatrixXd excitation,
                           double beta)
    : groups_(groups), mu_(std::move(mu)), excitation_(std::move(excitation)), beta_(beta) {
  if (groups < 1) throw std::invalid_argument("group count must be at least 1");
  const int g = pair_count(groups);
  if (mu_.size() != g) {
    throw std::invalid_argument("mu must have " + std::to_string(g) + " entries for K=" +
                                std::to_string(groups));
  }
  for (Eigen::Index p = 0; p < mu_.size(); ++p) {
    if (!std::isfinite(mu_[p]) || mu_[p] < 0.0) {
      throw std::invalid_argument("mu entries must be finite and nonnegative");
    }
  }
  validate_excitation(excitation_, g, "excitation matrix");
  if (!std::isfinite(beta_) || beta_ <= 0.0) {
    throw std::invalid_argument("beta must be finite and strictly positive");
  }
}

HawkesParams HawkesParams::diagonal(int groups, const Eigen::VectorXd& mu,
                                    const Eigen::VectorXd& alpha, double beta) {
  return HawkesParams(groups, mu, alpha.asDiagonal().toDenseMatrix(), beta);
}

HawkesParams HawkesParams::with_excitation(Eigen::MatrixXd excitation) const {
  return HawkesParams(groups_, mu_, std::move(excitation), beta_);
}

}  // namespace homophily
