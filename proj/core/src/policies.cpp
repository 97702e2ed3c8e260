#include "homophily/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace homophily {

std::string_view to_string(FairnessMode mode) {
  switch (mode) {
    case FairnessMode::kNone: return "none";
    case FairnessMode::kCrossGroupBoost: return "cross-group-boost";
    case FairnessMode::kGroupBlind: return "group-blind";
  }
  return "unknown";
}

double row_cosine(const Eigen::MatrixXd& embeddings, int u, int v) {
  const auto a = embeddings.row(u);
  const auto b = embeddings.row(v);
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

Eigen::MatrixXd spectral_embedding(const TemporalGraph& graph, int dim) {
  const int n = graph.nodes();
  if (dim < 1) throw std::invalid_argument("embedding dimension must be positive");
  Eigen::MatrixXd a = graph.adjacency_matrix();
  a.diagonal().array() += 1.0;
  const Eigen::VectorXd inv_sqrt_degree = a.rowwise().sum().array().rsqrt();
  const Eigen::MatrixXd normalized =
      inv_sqrt_degree.asDiagonal() * a * inv_sqrt_degree.asDiagonal();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normalized);
  const auto& values = solver.eigenvalues();   // ascending
  const auto& vectors = solver.eigenvectors();

  const int keep = std::min(dim, std::max(0, n - 1));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, dim);
  for (int c = 0; c < keep; ++c) {
    const int source = n - 2 - c;  // skip the leading eigenvector at n - 1
    const double scale = std::sqrt(std::max(values[source], 0.0));
    out.col(c) = vectors.col(source) * scale;
  }
  for (int r = 0; r < n; ++r) {
    const double norm = out.row(r).norm();
    if (norm > 1e-12) out.row(r) /= norm;
    else out.row(r).setZero();
  }
  return out;
}

namespace {

class CosineStatic final : public RecommenderPolicy {
 public:
  std::string_view name() const override { return "cosine-static"; }
  FairnessMode fairness_mode() const override { return FairnessMode::kNone; }
  void refit(const TemporalGraph&, double) override {}
  double score(int u, int v, const TemporalGraph& graph, double) const override {
    return row_cosine(graph.embeddings(), u, v);
  }
  std::unique_ptr<RecommenderPolicy> clone() const override {
    return std::make_unique<CosineStatic>(*this);
  }
};

/// Cosine on a spectral embedding re-estimated at every refit, plus an
/// optional additive bonus for same-group or cross-group pairs.
class SpectralCosine final : public RecommenderPolicy {
 public:
  enum class Bonus { kNone, kSameGroup, kCrossGroup };

  SpectralCosine(std::string name, Bonus bonus, const PolicyOptions& options)
      : name_(std::move(name)), bonus_(bonus), options_(options) {}

  std::string_view name() const override { return name_; }
  FairnessMode fairness_mode() const override {
    return bonus_ == Bonus::kCrossGroup ? FairnessMode::kCrossGroupBoost : FairnessMode::kNone;
  }
  void refit(const TemporalGraph& graph, double) override {
    embedding_ = spectral_embedding(graph, options_.embedding_dim);
  }
  double score(int u, int v, const TemporalGraph& graph, double) const override {
    if (embedding_.rows() != graph.nodes()) {
      throw std::logic_error(name_ + " scored before refit");
    }
    const double base = embedding_.row(u).dot(embedding_.row(v));
    const bool same = graph.group(u) == graph.group(v);
    switch (bonus_) {
      case Bonus::kNone: return base;
      case Bonus::kSameGroup: return base + (same ? options_.group_bonus : 0.0);
      case Bonus::kCrossGroup: return base + (same ? 0.0 : options_.group_bonus);
    }
    return base;
  }
  std::unique_ptr<RecommenderPolicy> clone() const override {
    return std::make_unique<SpectralCosine>(*this);
  }

 private:
  std::string name_;
  Bonus bonus_;
  PolicyOptions options_;
  Eigen::MatrixXd embedding_;
};

/// Constant score: the softmax over candidates is uniform.
class GroupBlindRandom final : public RecommenderPolicy {
 public:
  std::string_view name() const override { return "group-blind-random"; }
  FairnessMode fairness_mode() const override { return FairnessMode::kGroupBlind; }
  void refit(const TemporalGraph&, double) override {}
  double score(int, int, const TemporalGraph&, double) const override { return 0.0; }
  std::unique_ptr<RecommenderPolicy> clone() const override {
    return std::make_unique<GroupBlindRandom>(*this);
  }
};

}  // namespace

const std::vector<std::string>& builtin_policy_names() {
  static const std::vector<std::string> names{"cosine-static", "cosine-refit", "homophily-boost",
                                              "cross-boost", "group-blind-random"};
  return names;
}

std::unique_ptr<RecommenderPolicy> make_policy(std::string_view name,
                                               const PolicyOptions& options) {
  using Bonus = SpectralCosine::Bonus;
  if (name == "cosine-static") return std::make_unique<CosineStatic>();
  if (name == "cosine-refit") {
    return std::make_unique<SpectralCosine>("cosine-refit", Bonus::kNone, options);
  }
  if (name == "homophily-boost") {
    return std::make_unique<SpectralCosine>("homophily-boost", Bonus::kSameGroup, options);
  }
  if (name == "cross-boost") {
    return std::make_unique<SpectralCosine>("cross-boost", Bonus::kCrossGroup, options);
  }
  if (name == "group-blind-random") return std::make_unique<GroupBlindRandom>();
  std::string known;
  for (const auto& n : builtin_policy_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "' (builtins: " + known +
                              ")");
}

}  // namespace homophily
