#pragma once

#include <vector>

#include <Eigen/Dense>

#include "homophily/hawkes_params.hpp"
#include "homophily/regime_schedule.hpp"
#include "oracles.hpp"

namespace fixtures {

// Two groups, pairs ordered (1,1), (2,2), (1,2); row = target, column = source.
inline Eigen::MatrixXd two_group_excitation() {
  Eigen::MatrixXd a(3, 3);
  a << 0.60, 0.00, 0.05,
       0.00, 0.40, 0.05,
       0.10, 0.10, 0.20;
  return a;
}

inline Eigen::VectorXd two_group_mu() { return Eigen::Vector3d(0.8, 0.5, 0.2); }

inline homophily::HawkesParams two_group_params() {
  return homophily::HawkesParams(2, two_group_mu(), two_group_excitation(), 1.0);
}

// Stream w = pair (1,1), stream c = pair (1,2), pair (2,2) silent.
inline constexpr double kRegimeAlphaW[3] = {0.40, 0.75, 0.50};
inline constexpr double kRegimeAlphaC[3] = {0.20, 0.15, 0.50};
inline constexpr double kMuW = 0.8;
inline constexpr double kMuC = 0.6;
inline constexpr double kRegimeHorizon = 1500.0;
inline const std::vector<double> kRegimeBreakpoints{500.0, 1000.0};

inline std::vector<Eigen::MatrixXd> three_regime_matrices() {
  std::vector<Eigen::MatrixXd> out;
  for (int k = 0; k < 3; ++k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(0, 0) = kRegimeAlphaW[k];
    m(2, 2) = kRegimeAlphaC[k];
    out.push_back(m);
  }
  return out;
}

inline homophily::RegimeSchedule three_regime_schedule() {
  return homophily::RegimeSchedule::from_breakpoints(kRegimeBreakpoints, three_regime_matrices());
}

inline homophily::HawkesParams three_regime_params() {
  return homophily::HawkesParams(2, Eigen::Vector3d(kMuW, 0.0, kMuC), three_regime_matrices()[0], 1.0);
}

// Three intervals with two switches of the excitation matrix.
inline homophily::RegimeSchedule switching_schedule() {
  Eigen::MatrixXd a1(3, 3);
  a1 << 0.75, 0.00, 0.10,
        0.00, 0.60, 0.10,
        0.05, 0.05, 0.10;
  Eigen::MatrixXd a2(3, 3);
  a2 << 0.30, 0.00, 0.15,
        0.00, 0.30, 0.15,
        0.10, 0.10, 0.60;
  return homophily::RegimeSchedule({0.0, 30.0, 60.0}, {two_group_excitation(), a1, a2});
}

inline oracle::Matrix to_rows(const Eigen::MatrixXd& m) {
  oracle::Matrix out(static_cast<std::size_t>(m.rows()), oracle::Vector(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
  }
  return out;
}

inline oracle::Vector to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace fixtures
