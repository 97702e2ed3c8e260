#include "homophily/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace homophily {

ExpHawkesLikelihood::ExpHawkesLikelihood(std::span<const double> times, double length,
                                         double beta)
    : length_(length), beta_(beta), compensator_sum_(0.0) {
  if (!(length > 0.0)) throw std::invalid_argument("observation length must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  recursion_.reserve(times.size());
  double previous = 0.0;
  double r = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < 0.0 || t >= length) throw std::invalid_argument("event outside [0, T)");
    if (i > 0) {
      if (t < previous) throw std::invalid_argument("event times must be sorted");
      r = std::exp(-beta * (t - previous)) * (1.0 + r);
    }
    recursion_.push_back(r);
    compensator_sum_ += -std::expm1(-beta * (length - t));
    previous = t;
  }
  compensator_sum_ /= beta;
}

double ExpHawkesLikelihood::value(double mu, double alpha) const {
  double sum = 0.0;
  for (double r : recursion_) {
    const double lambda = mu + alpha * r;
    if (!(lambda > 0.0)) return -std::numeric_limits<double>::infinity();
    sum += std::log(lambda);
  }
  return sum - mu * length_ - alpha * compensator_sum_;
}

ExpHawkesLikelihood::Derivatives ExpHawkesLikelihood::derivatives(double mu,
                                                                  double alpha) const {
  Derivatives d{0.0, -length_, -compensator_sum_, 0.0, 0.0, 0.0};
  for (double r : recursion_) {
    const double lambda = mu + alpha * r;
    if (!(lambda > 0.0)) {
      const double inf = std::numeric_limits<double>::infinity();
      return {-inf, inf, inf, -inf, -inf, -inf};
    }
    const double inv = 1.0 / lambda;
    const double inv2 = inv * inv;
    d.value += std::log(lambda);
    d.d_mu += inv;
    d.d_alpha += r * inv;
    d.d_mu_mu -= inv2;
    d.d_mu_alpha -= r * inv2;
    d.d_alpha_alpha -= r * r * inv2;
  }
  d.value -= mu * length_ + alpha * compensator_sum_;
  return d;
}

double ExpHawkesLikelihood::profile_mu(double alpha) const {
  const double n = static_cast<double>(recursion_.size());
  if (recursion_.empty()) return 0.0;
  const double upper = n / length_;
  if (alpha == 0.0) return upper;

  // Score in mu is decreasing and convex; its root lies in (0, n/T]. Newton
  // steps are kept inside the shrinking bracket, bisecting when they escape.
  auto score = [&](double mu, double& slope) {
    double s = -length_;
    slope = 0.0;
    for (double r : recursion_) {
      const double inv = 1.0 / (mu + alpha * r);
      s += inv;
      slope -= inv * inv;
    }
    return s;
  };
  double lo = 0.0;
  double hi = upper;
  double mu = upper;
  for (int it = 0; it < 200; ++it) {
    double slope = 0.0;
    const double s = score(mu, slope);
    if (s > 0.0) lo = mu;
    else hi = mu;
    if (s == 0.0 || hi - lo <= 1e-15 * hi) break;
    double next = mu - s / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - mu) <= 1e-15 * mu) {
      mu = next;
      break;
    }
    mu = next;
  }
  return mu;
}

ScalarMaximum maximize_bounded(const std::function<double(double)>& f, double lo, double hi,
                               double tolerance, int max_iterations) {
  if (!(hi > lo)) throw std::invalid_argument("maximize_bounded needs lo < hi");
  constexpr double kGolden = 0.3819660112501051;
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
  auto g = [&](double x) { return -f(x); };

  double a = lo;
  double b = hi;
  double x = a + kGolden * (b - a);
  double w = x;
  double v = x;
  double fx = g(x);
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;

  for (int it = 1; it <= max_iterations; ++it) {
    const double mid = 0.5 * (a + b);
    const double tol1 = eps * std::abs(x) + tolerance / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) return {x, -fx, it, true};

    bool golden = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = x < mid ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = (x < mid ? b : a) - x;
      d = kGolden * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = g(u);
    if (fu <= fx) {
      if (u < x) b = x;
      else a = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x) a = u;
      else b = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, -fx, max_iterations, false};
}

}  // namespace homophily
