#include "homophily/temporal_graph.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace homophily {

TemporalGraph::TemporalGraph(int groups, std::vector<int> node_groups,
                             Eigen::MatrixXd embeddings, std::vector<double> popularity,
                             bool multi_edge)
    : groups_(groups),
      node_groups_(std::move(node_groups)),
      embeddings_(std::move(embeddings)),
      popularity_(std::move(popularity)),
      multi_edge_(multi_edge) {
  const auto n = node_groups_.size();
  if (groups_ < 1) throw std::invalid_argument("group count must be at least 1");
  if (static_cast<std::size_t>(embeddings_.rows()) != n || popularity_.size() != n) {
    throw std::invalid_argument("every node needs a group, an embedding and a popularity");
  }
  for (int g : node_groups_) {
    if (g < 1 || g > groups_) {
      throw std::invalid_argument("node group " + std::to_string(g) + " outside 1..K");
    }
  }
  adjacency_.assign(n * n, 0);
  degree_.assign(n, 0);
}

std::size_t TemporalGraph::slot(int u, int v) const {
  const auto n = node_groups_.size();
  if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
    throw std::out_of_range("node index out of range");
  }
  return static_cast<std::size_t>(u) * n + static_cast<std::size_t>(v);
}

bool TemporalGraph::adjacent(int u, int v) const { return adjacency_[slot(u, v)] != 0; }

bool TemporalGraph::connect(int u, int v) {
  if (u == v) throw std::invalid_argument("self-loops are not allowed");
  auto& cell = adjacency_[slot(u, v)];
  if (cell != 0) return false;
  cell = 1;
  adjacency_[slot(v, u)] = 1;
  ++degree_[static_cast<std::size_t>(u)];
  ++degree_[static_cast<std::size_t>(v)];
  ++adjacency_pairs_;
  return true;
}

void TemporalGraph::append_edge(double t, int u, int v) {
  if (u == v) throw std::invalid_argument("self-loops are not allowed");
  if (u > v) std::swap(u, v);
  if (!edges_.empty() && t < edges_.back().t) {
    throw std::invalid_argument("edge timestamps must be nondecreasing");
  }
  edges_.push_back({t, u, v});
}

bool TemporalGraph::add_edge(double t, int u, int v) {
  const bool first = connect(u, v);
  if (first || multi_edge_) append_edge(t, u, v);
  return first;
}

Eigen::MatrixXd TemporalGraph::adjacency_matrix() const {
  const auto n = static_cast<Eigen::Index>(node_groups_.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      a(u, v) = adjacency_[static_cast<std::size_t>(u * n + v)];
    }
  }
  return a;
}

}  // namespace homophily
