#pragma once

// Reference implementations used only by tests. They deliberately avoid the
// library's numerics (no Eigen decompositions, no recursions) so that a shared
// bug cannot make both sides agree.

#include <functional>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;
using Vector = std::vector<double>;

/// Gaussian elimination with partial pivoting.
Vector dense_solve(Matrix m, Vector b);

/// (I - A / beta) x = mu.
Vector stationary(const Matrix& a, const Vector& mu, double beta);

/// Largest root modulus of det(lambda I - M) for a 3 x 3 matrix, via the
/// closed-form cubic (trigonometric or Cardano branch).
double cubic_spectral_radius(const Matrix& m);

/// Trapezoidal product quadrature of
///   l(t) = mu + int_0^t A e^{-beta (t - s)} l(s) ds
/// on a uniform grid of step h. Returns samples at t = 0, h, 2h, ...
std::vector<Vector> volterra_meanfield(const Matrix& a, const Vector& mu, double beta,
                                       double horizon, double h);

/// Univariate Hawkes log-likelihood by the O(n^2) double sum.
double naive_loglik(const Vector& times, double length, double mu, double alpha, double beta);

/// Two-sided one-sample Kolmogorov-Smirnov statistic.
double ks_statistic(Vector samples, const std::function<double(double)>& cdf);
/// Asymptotic p-value P(K > sqrt(n) D) of the Kolmogorov distribution.
double ks_pvalue(double statistic, std::size_t n);

}  // namespace oracle
