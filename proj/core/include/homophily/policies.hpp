#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "homophily/temporal_graph.hpp"

namespace homophily {

enum class FairnessMode { kNone, kCrossGroupBoost, kGroupBlind };
std::string_view to_string(FairnessMode mode);

/// Score-based link recommender. Scores feed a softmax over each active
/// node's candidate pool.
class RecommenderPolicy {
 public:
  virtual ~RecommenderPolicy() = default;

  virtual std::string_view name() const = 0;
  virtual FairnessMode fairness_mode() const = 0;
  /// Re-estimates internal state from the current graph.
  virtual void refit(const TemporalGraph& graph, double t) = 0;
  /// Finite score for a non-adjacent pair.
  virtual double score(int u, int v, const TemporalGraph& graph, double t) const = 0;
  virtual std::unique_ptr<RecommenderPolicy> clone() const = 0;
};

struct PolicyOptions {
  int embedding_dim = 16;
  /// Additive same-group (homophily-boost) or cross-group (cross-boost) bonus.
  double group_bonus = 0.15;
};

/// Names accepted by make_policy, in a fixed order.
const std::vector<std::string>& builtin_policy_names();

/// Throws std::invalid_argument for an unknown name.
std::unique_ptr<RecommenderPolicy> make_policy(std::string_view name,
                                               const PolicyOptions& options = {});

/// Truncated spectral embedding of the current adjacency.
///
/// Eigen-decomposes D^{-1/2} (A + I) D^{-1/2}, drops the leading (degree)
/// eigenvector, keeps the next `dim` eigenvectors scaled by sqrt(max(eig, 0)),
/// and normalises rows to unit length (rows that vanish stay zero).
Eigen::MatrixXd spectral_embedding(const TemporalGraph& graph, int dim);

/// Cosine similarity of two rows; 0 when either row is zero.
double row_cosine(const Eigen::MatrixXd& embeddings, int u, int v);

}  // namespace homophily
