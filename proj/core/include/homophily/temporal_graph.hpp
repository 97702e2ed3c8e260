#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace homophily {

struct TimedEdge {
  double t;
  int u;  // u < v
  int v;

  bool operator==(const TimedEdge&) const = default;
};

/// Undirected temporal graph over a fixed node set with group labels,
/// unit-norm latent embeddings and acceptance propensities.
///
/// `edges()` keeps activations in time order; adjacency records the first
/// activation of each pair. Repeated activations are appended to `edges()`
/// only in multi-edge mode.
class TemporalGraph {
 public:
  TemporalGraph(int groups, std::vector<int> node_groups, Eigen::MatrixXd embeddings,
                std::vector<double> popularity, bool multi_edge = false);

  int nodes() const noexcept { return static_cast<int>(node_groups_.size()); }
  int groups() const noexcept { return groups_; }
  int group(int node) const { return node_groups_.at(static_cast<std::size_t>(node)); }
  const std::vector<int>& node_groups() const noexcept { return node_groups_; }
  const Eigen::MatrixXd& embeddings() const noexcept { return embeddings_; }
  double popularity(int node) const { return popularity_.at(static_cast<std::size_t>(node)); }
  const std::vector<double>& popularities() const noexcept { return popularity_; }
  bool multi_edge() const noexcept { return multi_edge_; }

  bool adjacent(int u, int v) const;
  int degree(int node) const { return degree_.at(static_cast<std::size_t>(node)); }
  std::size_t edge_count() const noexcept { return adjacency_pairs_; }

  /// Marks u-v adjacent. Returns true on first activation. Throws on self-loops.
  bool connect(int u, int v);
  /// Appends a timestamped activation (canonicalised to u < v); times must not decrease.
  void append_edge(double t, int u, int v);
  /// connect + append_edge (append skipped for repeats unless multi-edge).
  bool add_edge(double t, int u, int v);

  const std::vector<TimedEdge>& edges() const noexcept { return edges_; }

  /// Dense symmetric 0/1 adjacency matrix.
  Eigen::MatrixXd adjacency_matrix() const;

 private:
  std::size_t slot(int u, int v) const;

  int groups_;
  std::vector<int> node_groups_;
  Eigen::MatrixXd embeddings_;
  std::vector<double> popularity_;
  bool multi_edge_;
  std::vector<std::uint8_t> adjacency_;
  std::vector<int> degree_;
  std::size_t adjacency_pairs_ = 0;
  std::vector<TimedEdge> edges_;
};

}  // namespace homophily
