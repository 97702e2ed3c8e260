#pragma once

#include <functional>
#include <span>
#include <vector>

namespace homophily {

/// Log-likelihood of a univariate Hawkes process with kernel alpha e^{-beta t}
/// observed on [0, T):
///
///   L(mu, alpha) = sum_i log(mu + alpha R_i) - mu T - (alpha / beta) sum_i (1 - e^{-beta (T - t_i)})
///
/// with R_1 = 0 and R_i = e^{-beta (t_i - t_{i-1})} (1 + R_{i-1}). The recursion
/// is computed once at construction, so each evaluation is O(n).
class ExpHawkesLikelihood {
 public:
  /// `times` must be sorted and lie in [0, length).
  ExpHawkesLikelihood(std::span<const double> times, double length, double beta);

  std::size_t events() const noexcept { return recursion_.size(); }
  double length() const noexcept { return length_; }
  double beta() const noexcept { return beta_; }
  std::span<const double> recursion() const noexcept { return recursion_; }

  /// -inf when some mu + alpha R_i <= 0 while events exist.
  double value(double mu, double alpha) const;

  struct Derivatives {
    double value;
    double d_mu;
    double d_alpha;
    double d_mu_mu;
    double d_mu_alpha;
    double d_alpha_alpha;
  };
  Derivatives derivatives(double mu, double alpha) const;

  /// argmax over mu > 0 of L(mu, alpha); lies in (0, n / T]. Returns 0 without events.
  double profile_mu(double alpha) const;

 private:
  double length_;
  double beta_;
  std::vector<double> recursion_;
  double compensator_sum_;  // sum_i (1 - e^{-beta (T - t_i)}) / beta
};

struct ScalarMaximum {
  double x;
  double value;
  int iterations;
  bool converged;
};

/// Brent's bounded maximisation (golden section with parabolic steps) of `f` on
/// [lo, hi], absolute tolerance `tolerance` on x.
ScalarMaximum maximize_bounded(const std::function<double(double)>& f, double lo, double hi,
                               double tolerance, int max_iterations);

}  // namespace homophily
