#include "homophily/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "homophily/rng.hpp"

namespace homophily {

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (n_nodes < 4) fail("n_nodes must be at least 4 so that three candidates can exist");
  if (groups < 1 || groups > n_nodes) fail("groups must be in 1..n_nodes");
  if (static_cast<int>(prob_matrix.size()) != groups) fail("prob_matrix must be K x K");
  for (int a = 0; a < groups; ++a) {
    if (static_cast<int>(prob_matrix[static_cast<std::size_t>(a)].size()) != groups) {
      fail("prob_matrix must be K x K");
    }
    for (int b = 0; b < groups; ++b) {
      const double p = prob_matrix[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (!(p >= 0.0 && p <= 1.0)) fail("prob_matrix entries must lie in [0, 1]");
      if (p != prob_matrix[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]) {
        fail("prob_matrix must be symmetric");
      }
    }
  }
  if (!(activity_rate >= 0.0 && activity_rate <= 1.0)) fail("activity_rate must lie in [0, 1]");
  for (double p : top_probs) {
    if (!(p >= 0.0 && p <= 1.0)) fail("top_probs entries must lie in [0, 1]");
  }
  if (!(popularity_low >= 0.0 && popularity_low <= popularity_high && popularity_high <= 1.0)) {
    fail("popularity bounds must satisfy 0 <= low <= high <= 1");
  }
  if (latent_clusters < 1) fail("latent_clusters must be positive");
  if (!(cluster_noise >= 0.0)) fail("cluster_noise must be nonnegative");
  if (embedding_dim < 1) fail("embedding_dim must be positive");
  if (retrain_period < 0) fail("retrain_period must be nonnegative");
  if (horizon_pre < 1) fail("horizon_pre must be positive");
  if (horizon_lp < 0) fail("horizon_lp must be nonnegative");
  if (!(pre_temperature > 0.0) || !(softmax_temperature > 0.0)) {
    fail("softmax temperatures must be positive");
  }
}

namespace {

using Scorer = std::function<double(int, int)>;

struct StepContext {
  const SimConfig& config;
  TemporalGraph& graph;
  EventLog& log;
  Xoshiro256& rng;
  std::vector<AuditRecord>* audit;  // null in the pre-network phase
};

// Draws up to `k` indices without replacement with probability proportional to
// `weights` (successive sampling). `weights` is consumed.
std::vector<std::size_t> sample_without_replacement(std::vector<double>& weights, std::size_t k,
                                                    Xoshiro256& rng) {
  std::vector<std::size_t> picked;
  double total = 0.0;
  for (double w : weights) total += w;
  const std::size_t available =
      static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(),
                                             [](double w) { return w > 0.0; }));
  k = std::min(k, available);
  while (picked.size() < k && total > 0.0) {
    double target = rng.uniform() * total;
    std::size_t chosen = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      chosen = i;
      if (target < weights[i]) break;
      target -= weights[i];
    }
    picked.push_back(chosen);
    total -= weights[chosen];
    weights[chosen] = 0.0;
    // Guard against drift in the running total.
    if (total <= 0.0) {
      total = 0.0;
      for (double w : weights) total += w;
    }
  }
  return picked;
}

void run_step(StepContext& ctx, int step, const Scorer& score, double temperature) {
  const int n = ctx.graph.nodes();
  std::vector<int> active;
  for (int u = 0; u < n; ++u) {
    if (ctx.rng.uniform() < ctx.config.activity_rate) active.push_back(u);
  }

  struct Formed {
    int u;
    int v;
    bool record_edge;  // repeats only reach edges() in multi-edge mode
  };
  std::vector<Formed> formed;
  std::vector<int> candidates;
  std::vector<double> scores;
  std::vector<double> weights;
  for (int u : active) {
    candidates.clear();
    scores.clear();
    for (int v = 0; v < n; ++v) {
      if (v == u) continue;
      if (ctx.config.exclude_adjacent && ctx.graph.adjacent(u, v)) continue;
      candidates.push_back(v);
    }
    if (candidates.empty()) continue;

    double top = -std::numeric_limits<double>::infinity();
    for (int v : candidates) {
      const double s = score(u, v);
      if (!std::isfinite(s)) {
        throw std::runtime_error("policy produced a non-finite score for pair (" +
                                 std::to_string(u) + ", " + std::to_string(v) + ")");
      }
      scores.push_back(s);
      top = std::max(top, s);
    }
    weights.resize(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      weights[i] = std::exp((scores[i] - top) / temperature);
    }

    const auto picks = sample_without_replacement(weights, ctx.config.top_probs.size(), ctx.rng);
    AuditRecord record;
    if (ctx.audit != nullptr) {
      record.t = step;
      record.u = u;
      for (int v : candidates) {
        if (ctx.graph.group(v) == ctx.graph.group(u)) ++record.pool_same;
        else ++record.pool_cross;
      }
    }
    const auto gu = static_cast<std::size_t>(ctx.graph.group(u) - 1);
    for (std::size_t rank = 0; rank < picks.size(); ++rank) {
      const int v = candidates[picks[rank]];
      const auto gv = static_cast<std::size_t>(ctx.graph.group(v) - 1);
      const double p = (ctx.config.prob_matrix[gu][gv] + ctx.config.top_probs[rank]) *
                       ctx.graph.popularity(v);
      const bool accept = ctx.rng.uniform() < p;
      if (accept) {
        const bool first = ctx.graph.connect(u, v);
        formed.push_back({u, v, first || ctx.graph.multi_edge()});
      }
      if (ctx.audit != nullptr) {
        record.candidates.push_back(v);
        record.scores.push_back(scores[picks[rank]]);
        record.accepted.push_back(accept);
      }
    }
    if (ctx.audit != nullptr) ctx.audit->push_back(std::move(record));
  }

  const PairIndex index(ctx.graph.groups());
  const double count = static_cast<double>(formed.size());
  for (std::size_t k = 0; k < formed.size(); ++k) {
    const auto [u, v, record_edge] = formed[k];
    const double t = step + static_cast<double>(k) / count;
    if (record_edge) ctx.graph.append_edge(t, u, v);
    ctx.log.append(t, index.flat({ctx.graph.group(u), ctx.graph.group(v)}));
  }
}

Eigen::MatrixXd latent_embeddings(const SimConfig& config, Xoshiro256& rng) {
  const int d = config.embedding_dim;
  Eigen::MatrixXd centers(config.latent_clusters, d);
  for (int c = 0; c < config.latent_clusters; ++c) {
    for (int k = 0; k < d; ++k) centers(c, k) = rng.normal();
    centers.row(c).normalize();
  }
  Eigen::MatrixXd out(config.n_nodes, d);
  for (int u = 0; u < config.n_nodes; ++u) {
    const auto c = static_cast<Eigen::Index>(
        rng.below(static_cast<std::uint64_t>(config.latent_clusters)));
    for (int k = 0; k < d; ++k) out(u, k) = centers(c, k) + config.cluster_noise * rng.normal();
    const double norm = out.row(u).norm();
    if (norm > 0.0) out.row(u) /= norm;
  }
  return out;
}

}  // namespace

NetsimRun generate_pre_network(const SimConfig& config) {
  config.validate();
  Xoshiro256 rng(Xoshiro256::derive_seed(config.seed, 0));

  std::vector<int> node_groups(static_cast<std::size_t>(config.n_nodes));
  for (int u = 0; u < config.n_nodes; ++u) {
    node_groups[static_cast<std::size_t>(u)] = 1 + (u * config.groups) / config.n_nodes;
  }
  Eigen::MatrixXd embeddings = latent_embeddings(config, rng);
  std::vector<double> popularity(static_cast<std::size_t>(config.n_nodes));
  for (auto& p : popularity) p = rng.uniform(config.popularity_low, config.popularity_high);

  NetsimRun run{TemporalGraph(config.groups, std::move(node_groups), std::move(embeddings),
                              std::move(popularity), config.multi_edge),
                EventLog(config.groups, config.horizon_pre), {}};

  StepContext ctx{config, run.graph, run.log, rng, nullptr};
  const Scorer cosine = [&](int u, int v) {
    return run.graph.embeddings().row(u).dot(run.graph.embeddings().row(v));
  };
  for (int step = 0; step < config.horizon_pre; ++step) {
    run_step(ctx, step, cosine, config.pre_temperature);
  }
  return run;
}

NetsimRun run_lp_phase(NetsimRun run, RecommenderPolicy& policy, const SimConfig& config) {
  config.validate();
  Xoshiro256 rng(Xoshiro256::derive_seed(config.seed, 1));
  const int start = config.horizon_pre;
  const int end = config.horizon_pre + config.horizon_lp;
  if (end > run.log.horizon()) run.log.extend_horizon(end);

  StepContext ctx{config, run.graph, run.log, rng, &run.audit};
  policy.refit(run.graph, start);
  for (int step = start; step < end; ++step) {
    const int elapsed = step - start;
    if (config.retrain_period > 0 && elapsed > 0 && elapsed % config.retrain_period == 0) {
      policy.refit(run.graph, step);
    }
    const Scorer scorer = [&](int u, int v) { return policy.score(u, v, run.graph, step); };
    run_step(ctx, step, scorer, config.softmax_temperature);
  }
  return run;
}

ParityCounts parity_from_audit(const NetsimRun& run) {
  ParityCounts counts;
  for (const auto& record : run.audit) {
    const int gu = run.graph.group(record.u);
    std::size_t same_links = 0;
    std::size_t cross_links = 0;
    for (std::size_t k = 0; k < record.candidates.size(); ++k) {
      if (!record.accepted[k]) continue;
      if (run.graph.group(record.candidates[k]) == gu) ++same_links;
      else ++cross_links;
    }
    counts.same_total += record.pool_same;
    counts.cross_total += record.pool_cross;
    counts.same_positive += same_links;
    counts.cross_positive += cross_links;
  }
  return counts;
}

NetsimAnalysis analyze_run(const NetsimRun& run, const SimConfig& config, double beta,
                           bool tie_mu) {
  NetsimAnalysis out;
  const Window pre{0.0, static_cast<double>(config.horizon_pre)};
  const double lp_end = static_cast<double>(config.horizon_pre + config.horizon_lp);
  out.mu_pre = estimate_mu(run.log, pre);

  WindowedOptions options;
  options.fit.beta = beta;
  options.baseline_window = pre;
  options.tie_within_cross = tie_mu;

  if (config.horizon_lp > 0) {
    const Window lp{pre.end, lp_end};
    out.lp_fit = estimate_windows(run.log, std::span(&lp, 1), options).front();
    out.b_star = stationary_bias(out.lp_fit);

    std::vector<Window> windows;
    if (config.retrain_period > 0) {
      for (double s = pre.end; s < lp_end; s += config.retrain_period) {
        windows.push_back({s, std::min(lp_end, s + config.retrain_period)});
      }
    } else {
      windows.push_back(lp);
    }
    out.window_fits = estimate_windows(run.log, windows, options);
    for (const auto& fit : out.window_fits) {
      out.window_b_star.push_back(instantaneous_bias(stationary_intensity(fit), fit.groups));
    }
  }
  out.dp_gap = parity_from_audit(run).gap();
  const double last = std::nextafter(run.log.horizon(), 0.0);
  out.b_emp_end = empirical_bias(run.log, std::span(&last, 1)).front();
  return out;
}

}  // namespace homophily
