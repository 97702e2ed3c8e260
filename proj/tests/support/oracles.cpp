#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace oracle {

Vector dense_solve(Matrix m, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[pivot][c])) pivot = r;
    }
    if (m[pivot][c] == 0.0) throw std::runtime_error("singular");
    std::swap(m[c], m[pivot]);
    std::swap(b[c], b[pivot]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  Vector x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= m[r][k] * x[k];
    x[r] = s / m[r][r];
  }
  return x;
}

Vector stationary(const Matrix& a, const Vector& mu, double beta) {
  Matrix m = a;
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < m.size(); ++c) m[r][c] = (r == c ? 1.0 : 0.0) - a[r][c] / beta;
  }
  return dense_solve(m, mu);
}

double cubic_spectral_radius(const Matrix& m) {
  // det(lambda I - M) = lambda^3 + b lambda^2 + c lambda + d
  const double tr = m[0][0] + m[1][1] + m[2][2];
  const double minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] -
                        m[0][2] * m[2][0] + m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  const double b = -tr;
  const double c = minors;
  const double d = -det;
  // depressed cubic y^3 + p y + q with lambda = y - b / 3
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double shift = -b / 3.0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  std::vector<std::complex<double>> roots;
  if (disc <= 0.0) {
    const double r = std::sqrt(-p / 3.0);
    const double arg = r > 0.0 ? std::clamp(-q / (2.0 * r * r * r), -1.0, 1.0) : 0.0;
    const double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k) {
      roots.emplace_back(2.0 * r * std::cos((phi - 2.0 * M_PI * k) / 3.0) + shift, 0.0);
    }
  } else {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + s);
    const double v = std::cbrt(-q / 2.0 - s);
    roots.emplace_back(u + v + shift, 0.0);
    const double re = -(u + v) / 2.0 + shift;
    const double im = (u - v) * std::sqrt(3.0) / 2.0;
    roots.emplace_back(re, im);
    roots.emplace_back(re, -im);
  }
  double best = 0.0;
  for (const auto& z : roots) best = std::max(best, std::abs(z));
  return best;
}

std::vector<Vector> volterra_meanfield(const Matrix& a, const Vector& mu, double beta,
                                       double horizon, double h) {
  const std::size_t g = mu.size();
  const auto n = static_cast<std::size_t>(std::llround(horizon / h));
  std::vector<Vector> l{mu};
  // left side of the implicit trapezoid step: I - (h / 2) A
  Matrix lhs(g, Vector(g));
  for (std::size_t r = 0; r < g; ++r) {
    for (std::size_t c = 0; c < g; ++c) lhs[r][c] = (r == c ? 1.0 : 0.0) - 0.5 * h * a[r][c];
  }
  for (std::size_t step = 1; step <= n; ++step) {
    Vector acc(g, 0.0);  // sum_k w_k e^{-beta (t_n - t_k)} l_k, k < n
    for (std::size_t k = 0; k < step; ++k) {
      const double w = (k == 0 ? 0.5 : 1.0) * std::exp(-beta * h * static_cast<double>(step - k));
      for (std::size_t c = 0; c < g; ++c) acc[c] += w * l[k][c];
    }
    Vector rhs = mu;
    for (std::size_t r = 0; r < g; ++r) {
      for (std::size_t c = 0; c < g; ++c) rhs[r] += h * a[r][c] * acc[c];
    }
    l.push_back(dense_solve(lhs, rhs));
  }
  return l;
}

double naive_loglik(const Vector& times, double length, double mu, double alpha, double beta) {
  double ll = -mu * length;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double rate = mu;
    for (std::size_t j = 0; j < i; ++j) rate += alpha * std::exp(-beta * (times[i] - times[j]));
    ll += std::log(rate);
    ll -= alpha / beta * (1.0 - std::exp(-beta * (length - times[i])));
  }
  return ll;
}

double ks_statistic(Vector samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double statistic, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  // small-sample correction of Stephens
  const double x = (sn + 0.12 + 0.11 / sn) * statistic;
  if (x < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * x * x);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace oracle
