#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "homophily/bias.hpp"
#include "homophily/estimation.hpp"
#include "homophily/event_log.hpp"
#include "homophily/policies.hpp"
#include "homophily/temporal_graph.hpp"

namespace homophily {

/// Agent-based simulation settings. Time is measured in steps.
struct SimConfig {
  int n_nodes = 300;
  int groups = 3;
  /// K x K symmetric link-formation probabilities, indexed by 0-based group.
  std::vector<std::vector<double>> prob_matrix{
      {0.25, 0.05, 0.05}, {0.05, 0.25, 0.05}, {0.05, 0.05, 0.25}};
  double activity_rate = 0.1;
  std::array<double, 3> top_probs{0.3, 0.2, 0.1};
  double popularity_low = 0.5;  // popularity ~ Uniform(low, high)
  double popularity_high = 1.0;
  int latent_clusters = 4;
  double cluster_noise = 0.5;
  int embedding_dim = 16;
  int retrain_period = 0;  // steps between policy refits in the LP phase; 0 = never
  int horizon_pre = 200;
  int horizon_lp = 400;
  double pre_temperature = 1.0;
  double softmax_temperature = 0.1;
  bool exclude_adjacent = true;
  bool multi_edge = false;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// One active node's recommendation slate in the LP phase.
struct AuditRecord {
  double t = 0.0;  // step index
  int u = 0;
  std::vector<int> candidates;  // sampled, in rank order
  std::vector<double> scores;
  std::vector<bool> accepted;
  std::size_t pool_same = 0;   // same-group nodes in the candidate pool
  std::size_t pool_cross = 0;  // cross-group nodes in the candidate pool
};

struct NetsimRun {
  TemporalGraph graph;
  EventLog log;
  std::vector<AuditRecord> audit;
};

/// Pre-intervention phase: latent-cluster embeddings independent of groups,
/// per-step activation, softmax(sim - min(sim)) candidate sampling of three
/// non-adjacent nodes without replacement, acceptance with probability
/// (prob_matrix[g_i][g_j] + top_probs[rank]) * popularity[j].
///
/// Events at step t get timestamps t + k / n_t in emission order.
NetsimRun generate_pre_network(const SimConfig& config);

/// Recommender phase continuing a pre-network run: the same step loop with
/// candidate scores from `policy` and a softmax at config.softmax_temperature.
/// The policy is refit at the phase start and every retrain_period steps.
NetsimRun run_lp_phase(NetsimRun run, RecommenderPolicy& policy, const SimConfig& config);

/// Demographic parity counts from the audit: over every (active node,
/// candidate-pool node) pair, a positive is a link formed from the slate.
ParityCounts parity_from_audit(const NetsimRun& run);

struct NetsimAnalysis {
  Eigen::VectorXd mu_pre;          // N / T on the pre-network phase
  DiagonalFit lp_fit;              // alpha on the whole LP phase, mu held at mu_pre
  std::vector<DiagonalFit> window_fits;  // per retrain window (one window if no retraining)
  double b_star = 0.0;             // stationary bias of lp_fit
  std::vector<std::optional<double>> window_b_star;
  std::optional<double> dp_gap;
  std::optional<double> b_emp_end;
};

/// Estimation and bias pipeline over a finished run. `tie_mu` rebalances mu_pre
/// so that within and cross totals match.
NetsimAnalysis analyze_run(const NetsimRun& run, const SimConfig& config, double beta = 1.0,
                           bool tie_mu = false);

}  // namespace homophily
