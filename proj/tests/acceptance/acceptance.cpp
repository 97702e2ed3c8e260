// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"
#include "fixtures.hpp"
#include "homophily/bias.hpp"
#include "homophily/estimation.hpp"
#include "homophily/io.hpp"
#include "homophily/likelihood.hpp"
#include "homophily/meanfield.hpp"
#include "homophily/netsim.hpp"
#include "homophily/simulate.hpp"
#include "oracles.hpp"

using namespace homophily;

namespace {

constexpr int kW = 0;  // pair (1,1)
constexpr int kC = 2;  // pair (1,2)

struct Outcome {
  bool passed = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

template <typename Body>
std::vector<std::invoke_result_t<Body, int>> for_seeds(int count, Body body) {
  std::vector<std::future<std::invoke_result_t<Body, int>>> jobs;
  for (int s = 0; s < count; ++s) jobs.push_back(std::async(std::launch::async, body, s));
  std::vector<std::invoke_result_t<Body, int>> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

double regime_bias(int k) {
  const double w = fixtures::kMuW / (1.0 - fixtures::kRegimeAlphaW[k]);
  const double c = fixtures::kMuC / (1.0 - fixtures::kRegimeAlphaC[k]);
  return w / (w + c);
}

struct RegimeRun {
  EventLog log;
  std::vector<DiagonalFit> fits;
};

// Shared by criteria 1, 5 and 6: seeds 1000..1009.
const std::vector<RegimeRun>& regime_runs() {
  static const std::vector<RegimeRun> runs = for_seeds(10, [](int s) {
    const RegimeSchedule schedule = fixtures::three_regime_schedule();
    EventLog log = simulate(fixtures::three_regime_params(), &schedule, fixtures::kRegimeHorizon,
                            1000 + static_cast<std::uint64_t>(s));
    auto fits = estimate_windowed(log, fixtures::kRegimeBreakpoints);
    return RegimeRun{std::move(log), std::move(fits)};
  });
  return runs;
}

Outcome regime_recovery() {
  Outcome o;
  const auto& runs = regime_runs();
  const double n = static_cast<double>(runs.size());
  for (int k = 0; k < 3; ++k) {
    double aw = 0.0, ac = 0.0, mw = 0.0, mc = 0.0;
    for (const auto& r : runs) {
      const auto& f = r.fits[static_cast<std::size_t>(k)];
      aw += f.pairs[kW].alpha / n;
      ac += f.pairs[kC].alpha / n;
      mw += f.pairs[kW].mu / n;
      mc += f.pairs[kC].mu / n;
    }
    o.detail += fmt("w%.0f alpha=(%.3f,", k + 1, aw) + fmt("%.3f) ", ac);
    o.detail += fmt("mu=(%.3f,%.3f) ", mw, mc);
    const bool ok = std::abs(aw - fixtures::kRegimeAlphaW[k]) <= 0.10 &&
                    std::abs(ac - fixtures::kRegimeAlphaC[k]) <= 0.10 &&
                    std::abs(mw - fixtures::kMuW) <= 0.15 && std::abs(mc - fixtures::kMuC) <= 0.15;
    if (!ok) o.passed = false;
  }
  return o;
}

Outcome stationary_oracle() {
  Outcome o;
  const HawkesParams p = fixtures::two_group_params();
  const Eigen::VectorXd lambda = stationary_intensity(p);
  const auto ref = oracle::stationary(fixtures::to_rows(p.excitation()), fixtures::to_vec(p.mu()), 1.0);
  double diff = 0.0;
  for (int i = 0; i < 3; ++i) diff = std::max(diff, std::abs(lambda(i) - ref[static_cast<std::size_t>(i)]));
  o.check(diff <= 1e-10, fmt("solve differs by %.2e", diff));

  const double horizon = 2e4;
  const EventLog log = simulate(p, horizon, 7);
  const auto counts = log.counts({0.0, horizon});
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double rate = static_cast<double>(counts[static_cast<std::size_t>(i)]) / horizon;
    worst = std::max(worst, std::abs(rate / lambda(i) - 1.0));
  }
  o.check(worst <= 0.05, fmt("empirical rate off by %.1f%%", 100 * worst));
  if (o.passed) o.detail = fmt("max solve diff %.1e, max rate error %.2f%%", diff, 100 * worst);
  return o;
}

Outcome scalar_closed_form() {
  Outcome o;
  const HawkesParams p(1, Eigen::VectorXd::Constant(1, 0.8), Eigen::MatrixXd::Constant(1, 1, 0.4), 1.0);
  const double star = stationary_intensity(p)(0);
  o.check(std::abs(star - 4.0 / 3.0) <= 4.0 * std::numeric_limits<double>::epsilon(),
          fmt("lambda* = %.17g", star));
  const double kappa = 0.6;
  const double until = 20.0 / kappa;
  const auto traj = integrate_meanfield(p, nullptr, until, default_step(1.0));
  const double gap = std::abs(traj.values.back()(0) - 4.0 / 3.0);
  o.check(gap <= 1e-6, fmt("gap at t=20/kappa is %.2e", gap));
  o.check(std::abs(traj.times.back() - until) < 1e-12, "trajectory does not end at 20/kappa");
  if (o.passed) o.detail = fmt("lambda* = %.17g, gap %.2e at t=%.2f", star, gap, until);
  return o;
}

Outcome convergence_bound() {
  Outcome o;
  const RegimeSchedule s = fixtures::switching_schedule();
  const auto traj = integrate_meanfield(fixtures::two_group_params(), &s, 90.0, 0.01);
  const BoundCheck check = verify_convergence_bound(traj, 0.9);
  double min_margin = std::numeric_limits<double>::infinity();
  for (double m : check.margin) min_margin = std::min(min_margin, m);
  o.check(check.passed, "bound violated");
  o.check(check.intervals.size() == 3, "expected three intervals");
  o.detail += fmt("%.0f grid points, min margin %.3e, rho=", static_cast<double>(check.times.size()), min_margin);
  for (const auto& iv : check.intervals) o.detail += fmt("%.3f ", iv.spectral_radius);
  return o;
}

Outcome gradient_check() {
  Outcome o;
  double worst = 0.0;
  int interior = 0;
  for (const auto& r : regime_runs()) {
    for (const auto& fit : r.fits) {
      for (int p = 0; p < 3; ++p) {
        const PairFit& pf = fit.pairs[static_cast<std::size_t>(p)];
        if (pf.status != FitStatus::kOk || pf.at_boundary) continue;
        ++interior;
        std::vector<double> times = r.log.times(p, fit.window);
        for (double& t : times) t -= fit.window.start;
        const ExpHawkesLikelihood l(times, fit.window.length(), fit.beta);
        const double h = 1e-5;
        const double grad = (l.value(pf.mu, pf.alpha + h) - l.value(pf.mu, pf.alpha - h)) / (2 * h);
        const double rel = std::abs(grad) / std::abs(pf.log_likelihood);
        worst = std::max(worst, rel);
        if (rel > 1e-6) o.passed = false;
      }
    }
  }
  o.check(interior > 0, "no interior optimum found");
  o.detail = fmt("%.0f interior optima, max |dL/dalpha|/|L| = %.2e", interior, worst) + o.detail;
  return o;
}

Outcome bias_responsiveness() {
  Outcome o;
  const auto& runs = regime_runs();
  const double n = static_cast<double>(runs.size());
  double b[3] = {0.0, 0.0, 0.0};
  double emp_change = 0.0;
  for (const auto& r : runs) {
    for (int k = 0; k < 3; ++k) b[k] += stationary_bias(r.fits[static_cast<std::size_t>(k)]) / n;
    const std::vector<double> grid{500.0, 550.0};
    const auto emp = empirical_bias(r.log, grid);
    emp_change += std::abs(*emp[1] - *emp[0]) / n;
  }
  for (int k = 0; k < 3; ++k) {
    o.check(std::abs(b[k] - regime_bias(k)) <= 0.05,
            fmt("window %.0f: %.3f vs oracle %.3f", k + 1, b[k], regime_bias(k)));
  }
  const double jump = std::abs(b[1] - b[0]);
  o.check(jump > emp_change, fmt("B_inst jump %.3f not above B_emp change %.3f", jump, emp_change));
  if (o.passed) {
    o.detail = fmt("B* per window (%.3f, %.3f, %.3f)", b[0], b[1], b[2]) +
               fmt(" vs oracle (%.3f, %.3f, %.3f)", regime_bias(0), regime_bias(1), regime_bias(2)) +
               fmt("; jump %.3f > B_emp change %.4f", jump, emp_change);
  }
  return o;
}

struct PolicySummary {
  double b_star = 0.0;
  double dp = 0.0;
  double alpha_within = 0.0;
};

Outcome feedback_direction() {
  Outcome o;
  const cli::NetsimConfig cfg = cli::parse_netsim_config(
      read_text_file(std::string(HOMOPHILY_CONFIG_DIR) + "/netsim_three_groups.json"),
      "netsim_three_groups.json");
  const int retrain = cfg.sim.retrain_period;
  struct Combo {
    std::string policy;
    int retrain;
  };
  const std::vector<Combo> combos{{"homophily-boost", retrain},
                                  {"homophily-boost", 0},
                                  {"group-blind-random", retrain},
                                  {"cross-boost", retrain}};
  const int seeds = 10;
  const auto per_seed = for_seeds(seeds, [&](int r) {
    SimConfig sim = cfg.sim;
    sim.seed = cfg.sim.seed + static_cast<std::uint64_t>(r);
    const NetsimRun pre = generate_pre_network(sim);
    std::vector<PolicySummary> out;
    for (const auto& c : combos) {
      SimConfig s = sim;
      s.retrain_period = c.retrain;
      auto policy = make_policy(c.policy, cfg.policy_options);
      const NetsimRun run = run_lp_phase(pre, *policy, s);
      const NetsimAnalysis a = analyze_run(run, s, cfg.beta, cfg.tie_mu);
      const Eigen::VectorXd alpha = a.lp_fit.alpha_hat();
      out.push_back({a.b_star, a.dp_gap.value_or(0.0), alpha.head(sim.groups).mean()});
    }
    return out;
  });
  std::vector<PolicySummary> mean(combos.size());
  for (const auto& row : per_seed) {
    for (std::size_t c = 0; c < combos.size(); ++c) {
      mean[c].b_star += row[c].b_star / seeds;
      mean[c].dp += row[c].dp / seeds;
      mean[c].alpha_within += row[c].alpha_within / seeds;
    }
  }
  const auto& hb = mean[0];
  const auto& hb0 = mean[1];
  const auto& gb = mean[2];
  const auto& cb = mean[3];
  o.check(hb.b_star > gb.b_star && gb.b_star > cb.b_star, "(a) B* ordering");
  o.check(hb.dp > gb.dp && gb.dp > cb.dp, "(b) parity gap ordering");
  o.check(hb.b_star >= hb0.b_star, "(c) retraining lowered B*");
  o.check(hb.alpha_within > cb.alpha_within, "(d) within-pair alpha");
  o.detail += fmt("B* hb=%.3f gb=%.3f cb=%.3f", hb.b_star, gb.b_star, cb.b_star) +
              fmt(" hb(L0)=%.3f; dDP hb=%.3f", hb0.b_star, hb.dp) + fmt(" gb=%.3f cb=%.3f", gb.dp, cb.dp) +
              fmt("; alpha_w hb=%.3f cb=%.3f", hb.alpha_within, cb.alpha_within);
  return o;
}

Outcome degenerate_process() {
  Outcome o;
  const double rate = 1.3;
  const HawkesParams p(2, Eigen::Vector3d(0.6, 0.4, 0.3), Eigen::MatrixXd::Zero(3, 3), 1.0);
  EventLog log = simulate(p, 5000.0, 2024);
  std::vector<double> gaps;
  double prev = 0.0;
  for (const auto& e : log.events()) {
    gaps.push_back(e.t - prev);
    prev = e.t;
    if (gaps.size() == 5000) break;
  }
  o.check(gaps.size() == 5000, "fewer than 5000 events");
  const double d = oracle::ks_statistic(gaps, [&](double x) { return 1.0 - std::exp(-rate * x); });
  const double pvalue = oracle::ks_pvalue(d, gaps.size());
  o.check(pvalue > 0.01, fmt("KS p-value %.4f", pvalue));

  // Small worked examples.
  o.check(*instantaneous_bias(3.0, 1.0) == 0.75, "B_inst(3,1)");
  o.check(*instantaneous_bias(2.0, 0.0) == 1.0, "B_inst(2,0)");
  o.check(*instantaneous_bias(0.4, 0.4) == 0.5, "B_inst(0.4,0.4)");
  o.check(std::abs(*instantaneous_bias(10.0, 3.0) - 0.769) < 5e-4, "B_inst(10,3)");
  o.check(!instantaneous_bias(0.0, 0.0).has_value(), "B_inst(0,0) defined");
  EventLog small(2, 10.0);
  small.append(1.0, 0);
  small.append(2.0, 2);
  small.append(3.0, 1);
  small.append(4.0, 0);
  const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
  const auto emp = empirical_bias(small, grid);
  o.check(!emp[0].has_value() && *emp[1] == 1.0 && *emp[2] == 0.5 && *emp[3] == 0.75, "B_emp examples");
  DiagonalFit tied;
  tied.groups = 2;
  for (double mu : {0.9, 0.3, 0.2}) tied.pairs.push_back(PairFit{mu, 0.0, 0.0, 10, FitStatus::kOk, false, 0});
  o.check(stationary_bias(tied, true) == 0.5, "tied baseline");
  if (o.passed) o.detail = fmt("KS D=%.4f p=%.3f over 5000 gaps; worked examples exact", d, pvalue);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria{
      {1, "three-regime windowed recovery", 30.0, regime_recovery},
      {2, "stationary mean vs dense solve and long-run rate", 60.0, stationary_oracle},
      {3, "scalar closed form and mean-field convergence", 60.0, scalar_closed_form},
      {4, "convergence bound on switching schedule", 60.0, convergence_bound},
      {5, "likelihood gradient at interior optima", 60.0, gradient_check},
      {6, "bias responsiveness across regimes", 60.0, bias_responsiveness},
      {7, "recommender feedback direction", 300.0, feedback_direction},
      {8, "degenerate process and worked bias examples", 60.0, degenerate_process},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.limit_seconds) {
      o.passed = false;
      o.detail += fmt(" (runtime %.1fs over %.0fs limit)", seconds, c.limit_seconds);
    }
    if (!o.passed) ++failures;
    std::printf("%s criterion %d: %s [%.2fs] %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
