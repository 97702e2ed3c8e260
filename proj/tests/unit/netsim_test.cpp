#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "homophily/netsim.hpp"

using namespace homophily;

namespace {

SimConfig small_config(std::uint64_t seed) {
  SimConfig c;
  c.n_nodes = 90;
  c.horizon_pre = 60;
  c.horizon_lp = 60;
  c.embedding_dim = 8;
  c.seed = seed;
  return c;
}

double final_b_emp(const EventLog& log) {
  const double last = std::nextafter(log.horizon(), 0.0);
  return *empirical_bias(log, std::span(&last, 1)).front();
}

}  // namespace

TEST(Netsim, GroupBlindFormationMatchesPairShare) {
  // 100 nodes per group: a uniformly drawn partner shares the group with
  // probability 99 / 299.
  const double expected = 99.0 / 299.0;
  double mean = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    SimConfig c;
    c.prob_matrix.assign(3, std::vector<double>(3, 0.1));
    c.latent_clusters = 1;
    c.popularity_low = 1.0;
    c.popularity_high = 1.0;
    c.seed = s;
    mean += final_b_emp(generate_pre_network(c).log) / 10.0;
  }
  EXPECT_NEAR(mean, expected, 0.05);
}

TEST(Netsim, DiagonalHeavyProbabilitiesRaiseWithinShare) {
  double mean = 0.0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    SimConfig c;
    c.seed = s;
    mean += final_b_emp(generate_pre_network(c).log) / 5.0;
  }
  EXPECT_GT(mean, 99.0 / 299.0 + 0.1);
}

TEST(Netsim, NoActivityMeansNoEdges) {
  SimConfig c = small_config(3);
  c.activity_rate = 0.0;
  const NetsimRun pre = generate_pre_network(c);
  EXPECT_TRUE(pre.graph.edges().empty());
  EXPECT_TRUE(pre.log.empty());
  auto policy = make_policy("cosine-static");
  const NetsimRun lp = run_lp_phase(pre, *policy, c);
  EXPECT_TRUE(lp.graph.edges().empty());
  EXPECT_TRUE(lp.audit.empty());
  EXPECT_EQ(lp.log.horizon(), 120.0);
}

TEST(Netsim, EventLogIsTheGroupProjectionOfEdges) {
  const SimConfig c = small_config(4);
  auto policy = make_policy("homophily-boost");
  const NetsimRun run = run_lp_phase(generate_pre_network(c), *policy, c);
  const auto& edges = run.graph.edges();
  const auto events = run.log.events();
  ASSERT_EQ(edges.size(), events.size());
  ASSERT_FALSE(edges.empty());
  const PairIndex index(c.groups);
  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    EXPECT_EQ(edges[k].t, events[k].t);
    EXPECT_EQ(index.flat({run.graph.group(edges[k].u), run.graph.group(edges[k].v)}), events[k].mark);
    EXPECT_LT(edges[k].u, edges[k].v);
    EXPECT_TRUE(seen.insert({edges[k].u, edges[k].v}).second);
    EXPECT_TRUE(run.graph.adjacent(edges[k].u, edges[k].v));
  }
  EXPECT_EQ(run.graph.edge_count(), edges.size());
}

TEST(Netsim, TimestampsSpreadFormationsWithinAStep) {
  const NetsimRun pre = generate_pre_network(small_config(5));
  std::size_t k = 0;
  const auto events = pre.log.events();
  while (k < events.size()) {
    const double step = std::floor(events[k].t);
    std::size_t end = k;
    while (end < events.size() && std::floor(events[end].t) == step) ++end;
    const double n = static_cast<double>(end - k);
    for (std::size_t j = k; j < end; ++j) {
      EXPECT_DOUBLE_EQ(events[j].t, step + static_cast<double>(j - k) / n);
    }
    k = end;
  }
}

TEST(Netsim, SameSeedIsDeterministic) {
  const SimConfig c = small_config(6);
  auto a = make_policy("cosine-refit");
  auto b = make_policy("cosine-refit");
  const NetsimRun x = run_lp_phase(generate_pre_network(c), *a, c);
  const NetsimRun y = run_lp_phase(generate_pre_network(c), *b, c);
  EXPECT_EQ(x.graph.edges(), y.graph.edges());
  EXPECT_EQ(x.log, y.log);
  ASSERT_EQ(x.audit.size(), y.audit.size());
  for (std::size_t k = 0; k < x.audit.size(); ++k) EXPECT_EQ(x.audit[k].candidates, y.audit[k].candidates);

  SimConfig other = c;
  other.seed = 7;
  EXPECT_NE(generate_pre_network(other).log, generate_pre_network(c).log);
}

TEST(Netsim, CandidatesAreDistinctNonAdjacentOthers) {
  SimConfig c = small_config(8);
  auto policy = make_policy("cross-boost");
  const NetsimRun pre = generate_pre_network(c);
  const NetsimRun run = run_lp_phase(pre, *policy, c);
  ASSERT_FALSE(run.audit.empty());
  for (const auto& r : run.audit) {
    EXPECT_GE(r.t, c.horizon_pre);
    EXPECT_LE(r.candidates.size(), 3u);
    EXPECT_EQ(r.candidates.size(), r.scores.size());
    EXPECT_EQ(r.candidates.size(), r.accepted.size());
    const std::set<int> unique(r.candidates.begin(), r.candidates.end());
    EXPECT_EQ(unique.size(), r.candidates.size());
    EXPECT_EQ(unique.count(r.u), 0u);
    EXPECT_LE(r.pool_same + r.pool_cross, static_cast<std::size_t>(c.n_nodes - 1));
    // Pre-network links are never recommended again.
    for (int v : r.candidates) EXPECT_FALSE(pre.graph.adjacent(r.u, v));
  }
}

TEST(Netsim, LargeSameGroupBonusOnlyRecommendsSameGroup) {
  SimConfig c = small_config(9);
  c.softmax_temperature = 1e-3;
  PolicyOptions options;
  options.group_bonus = 3.0;
  auto policy = make_policy("homophily-boost", options);
  const NetsimRun run = run_lp_phase(generate_pre_network(c), *policy, c);
  std::size_t same = 0;
  std::size_t total = 0;
  for (const auto& r : run.audit) {
    for (int v : r.candidates) {
      ++total;
      if (run.graph.group(v) == run.graph.group(r.u)) ++same;
    }
  }
  ASSERT_GT(total, 0u);
  EXPECT_EQ(same, total);
}

TEST(Netsim, GroupBlindPolicyHasSmallParityGap) {
  SimConfig c;
  c.seed = 10;
  auto policy = make_policy("group-blind-random");
  const NetsimRun run = run_lp_phase(generate_pre_network(c), *policy, c);
  const auto gap = parity_from_audit(run).gap();
  ASSERT_TRUE(gap.has_value());
  EXPECT_LT(*gap, 0.05);
}

TEST(Netsim, AnalysisHoldsBaselineFromPrePhase) {
  SimConfig c = small_config(11);
  c.retrain_period = 20;
  auto policy = make_policy("homophily-boost");
  const NetsimRun run = run_lp_phase(generate_pre_network(c), *policy, c);
  const NetsimAnalysis a = analyze_run(run, c);
  EXPECT_EQ(a.lp_fit.mu_hat(), a.mu_pre);
  EXPECT_EQ(a.window_fits.size(), 3u);
  EXPECT_EQ(a.window_b_star.size(), 3u);
  EXPECT_GT(a.b_star, 0.0);
  EXPECT_LT(a.b_star, 1.0);
  EXPECT_TRUE(a.dp_gap.has_value());
  EXPECT_DOUBLE_EQ(*a.b_emp_end, final_b_emp(run.log));
}

TEST(Netsim, MultiEdgeModeRecordsRepeats) {
  SimConfig c = small_config(12);
  c.exclude_adjacent = false;
  c.multi_edge = true;
  c.n_nodes = 6;
  c.groups = 2;
  c.prob_matrix = {{0.5, 0.5}, {0.5, 0.5}};
  const NetsimRun pre = generate_pre_network(c);
  EXPECT_EQ(pre.graph.edges().size(), pre.log.size());
  EXPECT_GT(pre.graph.edges().size(), pre.graph.edge_count());

  c.multi_edge = false;
  const NetsimRun single = generate_pre_network(c);
  EXPECT_EQ(single.graph.edges().size(), single.graph.edge_count());
  EXPECT_GT(single.log.size(), single.graph.edge_count());
}

TEST(Policies, RefitEmbeddingFollowsTheGraph) {
  TemporalGraph g(2, {1, 1, 1, 1, 1, 2, 2, 2, 2, 2}, Eigen::MatrixXd::Zero(10, 4),
                  std::vector<double>(10, 1.0));
  for (int v = 1; v < 5; ++v) g.add_edge(0.0, 0, v);
  g.add_edge(0.0, 5, 6);
  PolicyOptions options;
  options.embedding_dim = 4;
  auto policy = make_policy("cosine-refit", options);
  EXPECT_THROW(policy->score(0, 9, g, 0.0), std::logic_error);
  policy->refit(g, 0.0);
  const double before = policy->score(1, 6, g, 0.0);
  for (int v = 6; v < 10; ++v) g.add_edge(1.0, 1, v);
  policy->refit(g, 1.0);
  EXPECT_NE(policy->score(1, 6, g, 1.0), before);

  auto frozen = make_policy("cosine-static");
  frozen->refit(g, 1.0);
  EXPECT_EQ(frozen->score(1, 6, g, 1.0), 0.0);
}

TEST(Policies, BonusesFollowGroupMembership) {
  TemporalGraph g(2, {1, 1, 2, 2}, Eigen::MatrixXd::Zero(4, 2), std::vector<double>(4, 1.0));
  g.add_edge(0.0, 0, 1);
  g.add_edge(0.0, 2, 3);
  PolicyOptions options;
  options.embedding_dim = 2;
  options.group_bonus = 0.4;
  auto plain = make_policy("cosine-refit", options);
  auto boost = make_policy("homophily-boost", options);
  auto cross = make_policy("cross-boost", options);
  for (auto* p : {plain.get(), boost.get(), cross.get()}) p->refit(g, 0.0);
  EXPECT_DOUBLE_EQ(boost->score(0, 1, g, 0.0), plain->score(0, 1, g, 0.0) + 0.4);
  EXPECT_DOUBLE_EQ(boost->score(0, 2, g, 0.0), plain->score(0, 2, g, 0.0));
  EXPECT_DOUBLE_EQ(cross->score(0, 2, g, 0.0), plain->score(0, 2, g, 0.0) + 0.4);
  EXPECT_EQ(cross->fairness_mode(), FairnessMode::kCrossGroupBoost);
  EXPECT_EQ(make_policy("group-blind-random")->fairness_mode(), FairnessMode::kGroupBlind);
}

TEST(Netsim, RejectsInvalidConfigAndUnknownPolicy) {
  SimConfig c;
  c.n_nodes = 3;
  EXPECT_THROW(generate_pre_network(c), std::invalid_argument);
  SimConfig asym;
  asym.prob_matrix[0][1] = 0.2;
  EXPECT_THROW(asym.validate(), std::invalid_argument);
  try {
    make_policy("pagerank");
    FAIL();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    for (const auto& name : builtin_policy_names()) EXPECT_NE(what.find(name), std::string::npos);
  }
}
