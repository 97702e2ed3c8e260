#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "homophily/estimation.hpp"
#include "homophily/event_log.hpp"
#include "homophily/hawkes_params.hpp"
#include "homophily/intensity.hpp"
#include "homophily/meanfield.hpp"

namespace homophily {

/// Within-group and cross-group aggregates of a per-pair quantity.
struct Aggregate {
  double within = 0.0;
  double cross = 0.0;
};

/// Sums (i,i) entries into `within` and (i,j), i<j, into `cross`.
Aggregate aggregate_pairs(const Eigen::VectorXd& per_pair, int groups);

/// lambda_w / (lambda_w + lambda_c); nullopt when both are zero.
/// Throws std::invalid_argument for negative or non-finite input.
std::optional<double> instantaneous_bias(double lambda_within, double lambda_cross);

/// Convenience overload aggregating a per-pair intensity vector.
std::optional<double> instantaneous_bias(const Eigen::VectorXd& per_pair, int groups);

/// B_emp(t) = N_w(t) / (N_w(t) + N_c(t)) counting events with s <= t
/// (right-continuous). nullopt while no event has occurred. `times` must be sorted.
std::vector<std::optional<double>> empirical_bias(const EventLog& log,
                                                  std::span<const double> times);

/// Stationary bias from full parameters; throws NonStationaryError.
double stationary_bias(const HawkesParams& params);

/// Stationary bias of a diagonal fit: lambda*_p = mu_p / (1 - alpha_p / beta).
/// With `tie_mu`, mu is first rebalanced so the within and cross totals match.
double stationary_bias(const DiagonalFit& fit, bool tie_mu = false);

/// Stationary intensities implied by a diagonal fit.
Eigen::VectorXd stationary_intensity(const DiagonalFit& fit, bool tie_mu = false);

enum class BiasSource { kModelTrue, kMeanField, kWindowEstimated };
std::string_view to_string(BiasSource source);

struct BiasSeries {
  std::vector<double> times;
  std::vector<std::optional<double>> b_emp;
  std::vector<std::optional<double>> b_inst;
  BiasSource source = BiasSource::kWindowEstimated;
};

/// B_emp from the log and B_inst from the window fit covering each grid time.
BiasSeries window_bias_series(const EventLog& log, std::span<const DiagonalFit> fits,
                              std::span<const double> times, bool tie_mu = false);

/// B_emp from the log and B_inst from the mean-field trajectory (linear
/// interpolation between trajectory samples).
BiasSeries meanfield_bias_series(const EventLog& log, const MeanFieldTrajectory& trajectory,
                                 std::span<const double> times);

/// B_emp from the log and B_inst from the realised conditional intensity.
BiasSeries conditional_bias_series(const EventLog& log, const HawkesParams& params,
                                   const RegimeSchedule* schedule, RegimeMode mode,
                                   std::span<const double> times);

/// A binary prediction on a node pair, for the demographic parity gap.
struct PairPrediction {
  int u;
  int v;
  bool positive;
};

/// Positive-prediction counts split by same-group and cross-group pairs.
struct ParityCounts {
  std::size_t same_positive = 0;
  std::size_t same_total = 0;
  std::size_t cross_positive = 0;
  std::size_t cross_total = 0;

  void add(bool same_group, bool positive, std::size_t count = 1);
  ParityCounts& operator+=(const ParityCounts& other);
  /// |P(h=1 | same) - P(h=1 | cross)|; nullopt if either side has no pairs.
  std::optional<double> gap() const;
};

/// Demographic parity gap over explicit predictions; `groups[u]` is the group of node u.
std::optional<double> demographic_parity_gap(std::span<const PairPrediction> predictions,
                                             std::span<const int> groups);

}  // namespace homophily
