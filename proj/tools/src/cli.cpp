#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "builtin_configs.hpp"
#include "config.hpp"
#include "homophily/bias.hpp"
#include "homophily/estimation.hpp"
#include "homophily/io.hpp"
#include "homophily/meanfield.hpp"
#include "homophily/netsim.hpp"
#include "homophily/policies.hpp"
#include "homophily/rng.hpp"
#include "homophily/simulate.hpp"
#include "manifest.hpp"
#include "parallel.hpp"

namespace homophily::cli {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path default_output_root() {
  if (const char* env = std::getenv("HOMOPHILY_OUT"); env != nullptr && *env != '\0') return env;
  return "homophily-out";
}

namespace {

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string join(const Eigen::VectorXd& v, int digits = 6) {
  std::string s = "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fixed(v(k), digits);
  return s + ")";
}

std::string replicate_dir(std::size_t r) {
  std::ostringstream s;
  s << "rep_" << std::setw(3) << std::setfill('0') << r;
  return s.str();
}

std::vector<double> grid(double horizon, double step) {
  std::vector<double> t;
  const auto n = static_cast<std::size_t>(std::floor(horizon / step + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    const double x = static_cast<double>(k) * step;
    if (x < horizon) t.push_back(x);
  }
  return t;
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Per-interval parameters of a (possibly scheduled) config.
std::vector<HawkesParams> interval_params(const HawkesConfig& cfg) {
  if (!cfg.schedule) return {cfg.params};
  std::vector<HawkesParams> out;
  for (const auto& m : cfg.schedule->matrices()) out.push_back(cfg.params.with_excitation(m));
  return out;
}

std::string_view regime_word(const StabilityReport& r) { return to_string(r.regime); }

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string config;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  std::string format = "jsonl";
  std::size_t replicates = 1;
  unsigned jobs = 1;
};

void write_log(const fs::path& dir, const EventLog& log, const std::string& format) {
  if (format == "csv") write_event_log_csv(dir / "events.csv", log);
  else write_event_log_jsonl(dir / "events.jsonl", log);
}

void cmd_simulate(const SimulateOptions& o, const fs::path& out_dir, Streams io,
                  RunManifest& manifest) {
  const HawkesConfig cfg = parse_hawkes_config(read_text_file(o.config), o.config);
  const double horizon = o.horizon ? *o.horizon : cfg.horizon.value_or(0.0);
  if (!(horizon > 0.0)) throw UsageError("a positive horizon is required (config key or --horizon)");
  const std::uint64_t seed = o.seed.value_or(cfg.seed);
  const RegimeSchedule* schedule = cfg.schedule ? &*cfg.schedule : nullptr;
  if (schedule) schedule->validate_against(horizon, cfg.params.pairs());
  manifest.config = cfg.snapshot;
  manifest.seed = seed;
  manifest.inputs = {o.config};

  if (o.replicates <= 1) {
    const EventLog log = simulate(cfg.params, schedule, horizon, seed, cfg.mode);
    write_log(out_dir, log, o.format);
    io.out << "simulated " << log.size() << " events on [0, " << horizon << ") with seed " << seed
           << "\n";
    return;
  }
  std::vector<std::vector<std::size_t>> counts(o.replicates);
  std::vector<std::uint64_t> seeds(o.replicates);
  parallel_for(o.replicates, o.jobs, [&](std::size_t r) {
    seeds[r] = Xoshiro256::derive_seed(seed, r);
    const EventLog log = simulate(cfg.params, schedule, horizon, seeds[r], cfg.mode);
    write_log(out_dir / replicate_dir(r), log, o.format);
    counts[r] = log.counts({0.0, horizon});
  });
  const PairIndex index(cfg.params.groups());
  write_file(out_dir / "summary.csv", [&](std::ostream& s) {
    s << "replicate,seed,events";
    for (int p = 0; p < index.size(); ++p) {
      s << ",n_" << index.pair(p).i() << '_' << index.pair(p).j();
    }
    s << '\n';
    for (std::size_t r = 0; r < o.replicates; ++r) {
      s << r << ',' << seeds[r] << ','
        << std::accumulate(counts[r].begin(), counts[r].end(), std::size_t{0});
      for (auto c : counts[r]) s << ',' << c;
      s << '\n';
    }
  });
  io.out << "simulated " << o.replicates << " replicates into " << out_dir.string() << "\n";
}

// ---------------------------------------------------------------- estimate

struct EstimateOptions {
  std::string log;
  std::vector<double> breakpoints;
  double beta = 1.0;
  std::string baseline = "joint";
  std::vector<double> mu_from_window;
  bool tie_mu_wc = false;
  std::size_t min_events = 5;
  std::string truth;
};

std::optional<Eigen::MatrixXd> truth_table(const std::string& path, std::size_t windows) {
  if (path.empty()) return std::nullopt;
  const HawkesConfig cfg = parse_hawkes_config(read_text_file(path), path);
  const auto params = interval_params(cfg);
  if (params.size() != windows) {
    throw UsageError("--truth has " + std::to_string(params.size()) + " regimes but the fit has " +
                     std::to_string(windows) + " windows");
  }
  Eigen::MatrixXd t(cfg.params.pairs(), static_cast<Eigen::Index>(windows));
  for (std::size_t w = 0; w < windows; ++w) {
    t.col(static_cast<Eigen::Index>(w)) = params[w].excitation().diagonal();
  }
  return t;
}

void cmd_estimate(const EstimateOptions& o, const fs::path& out_dir, Streams io,
                  RunManifest& manifest) {
  const EventLog log = read_event_log(o.log);
  manifest.inputs = {o.log};
  if (!o.truth.empty()) manifest.inputs.push_back(o.truth);

  WindowedOptions opts;
  opts.fit.beta = o.beta;
  opts.fit.min_events = o.min_events;
  opts.fit.baseline = o.baseline == "closed-form" ? BaselineMode::kClosedForm : BaselineMode::kJoint;
  opts.tie_within_cross = o.tie_mu_wc;
  if (!o.mu_from_window.empty()) {
    if (o.mu_from_window.size() != 2) throw UsageError("--mu-from-window takes START,END");
    opts.baseline_window = Window{o.mu_from_window[0], o.mu_from_window[1]};
  }
  if (!std::is_sorted(o.breakpoints.begin(), o.breakpoints.end())) {
    throw UsageError("--breakpoints must be sorted");
  }
  const auto fits = estimate_windowed(log, o.breakpoints, opts);
  if (log.empty()) io.err << "warning: the log has no events; every fit is flagged low-data\n";

  const PairIndex index(log.groups());
  for (std::size_t w = 0; w < fits.size(); ++w) {
    const auto& f = fits[w];
    io.out << "window [" << f.window.start << ", " << f.window.end << ")";
    try {
      io.out << "  B*_inst " << fixed(stationary_bias(f, o.tie_mu_wc));
    } catch (const std::exception&) {
      io.out << "  B*_inst undefined";
    }
    io.out << "\n";
    for (int p = 0; p < index.size(); ++p) {
      const auto& pf = f.pairs[static_cast<std::size_t>(p)];
      io.out << "  " << index.pair(p).to_string() << "  mu_hat " << fixed(pf.mu) << "  alpha_hat "
             << fixed(pf.alpha) << "  events " << pf.events << "  " << to_string(pf.status) << "\n";
      if (pf.status != FitStatus::kOk && !log.empty()) {
        io.err << "warning: window " << w + 1 << " pair " << index.pair(p).to_string() << ": "
               << to_string(pf.status) << "\n";
      }
    }
  }
  write_text_file(out_dir / "fits.json", fits_to_json(fits));
  const auto truth = truth_table(o.truth, fits.size());
  write_file(out_dir / "regime_table.csv",
             [&](std::ostream& s) { write_regime_table_csv(s, fits, truth); });
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string params;
  std::string fit;
  std::string log;
  std::optional<double> horizon;
  std::optional<double> step;
  bool verify_bound = false;
  double safety = 0.9;
  double grid_step = 1.0;
  bool tie_mu_wc = false;
};

json report_json(const StabilityReport& report, int groups) {
  return json::parse(stability_report_to_json(report, groups));
}

void analyze_params(const AnalyzeOptions& o, const fs::path& out_dir, Streams io,
                    RunManifest& manifest) {
  const HawkesConfig cfg = parse_hawkes_config(read_text_file(o.params), o.params);
  manifest.config = cfg.snapshot;
  manifest.inputs = {o.params};
  const int groups = cfg.params.groups();
  const auto params = interval_params(cfg);

  std::vector<StabilityReport> reports;
  bool all_subcritical = true;
  double min_kappa = std::numeric_limits<double>::infinity();
  for (const auto& p : params) {
    reports.push_back(analyze_stability(p));
    all_subcritical = all_subcritical && reports.back().regime == StabilityRegime::kSubcritical;
    if (reports.back().kappa_bound) min_kappa = std::min(min_kappa, *reports.back().kappa_bound);
  }

  json doc;
  if (cfg.schedule) {
    doc = {{"K", groups}, {"intervals", json::array()}};
    for (std::size_t k = 0; k < reports.size(); ++k) {
      json r = report_json(reports[k], groups);
      r["start"] = cfg.schedule->starts()[k];
      doc["intervals"].push_back(r);
    }
  } else {
    doc = report_json(reports.front(), groups);
  }
  write_text_file(out_dir / "stability.json", doc.dump(2) + "\n");

  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    if (cfg.schedule) io.out << "interval " << k + 1 << " from t = " << cfg.schedule->starts()[k] << "\n";
    io.out << "  spectral radius " << fixed(r.spectral_radius, 8) << "  (" << regime_word(r) << ")\n";
    if (r.stationary) {
      io.out << "  kappa bound " << fixed(*r.kappa_bound, 6) << "\n";
      io.out << "  stationary intensity " << join(*r.stationary, 8) << "\n";
      if (auto b = instantaneous_bias(*r.stationary, groups)) {
        io.out << "  B*_inst " << fixed(*b, 8) << "\n";
      }
    } else {
      io.out << "  non-stationary: no stationary mean exists\n";
    }
  }

  std::optional<double> horizon = o.horizon ? o.horizon : cfg.horizon;
  if (!horizon && all_subcritical) {
    horizon = (cfg.schedule ? cfg.schedule->starts().back() : 0.0) +
              std::ceil(20.0 / (min_kappa > 0.0 ? min_kappa : 1.0));
  }
  std::optional<EventLog> log;
  if (!o.log.empty()) {
    log.emplace(read_event_log(o.log));
    manifest.inputs.push_back(o.log);
    if (!horizon) horizon = log->horizon();
  }
  if (!horizon) {
    if (o.verify_bound) throw NonStationaryError(reports.front().spectral_radius);
    io.out << "no trajectory: the process is not subcritical and no horizon was given\n";
    return;
  }

  const double step = o.step ? *o.step : cfg.step.value_or(default_step(cfg.params.beta()));
  const RegimeSchedule* schedule = cfg.schedule ? &*cfg.schedule : nullptr;
  const MeanFieldTrajectory traj = integrate_meanfield(cfg.params, schedule, *horizon, step);
  write_file(out_dir / "trajectory.csv", [&](std::ostream& s) { write_trajectory_csv(s, traj, groups); });

  const EventLog empty(groups, *horizon);
  const EventLog& bias_log = log ? *log : empty;
  const auto times = grid(std::min(*horizon, bias_log.horizon()), o.grid_step);
  write_file(out_dir / "bias_meanfield.csv", [&](std::ostream& s) {
    write_bias_series_csv(s, meanfield_bias_series(bias_log, traj, times));
  });
  if (log) {
    write_file(out_dir / "bias_conditional.csv", [&](std::ostream& s) {
      write_bias_series_csv(s, conditional_bias_series(*log, cfg.params, schedule, cfg.mode, times));
    });
  }

  if (o.verify_bound) {
    const BoundCheck check = verify_convergence_bound(traj, o.safety);
    write_file(out_dir / "margins.csv", [&](std::ostream& s) { write_margin_csv(s, check); });
    json b{{"passed", check.passed}, {"safety", o.safety}, {"intervals", json::array()}};
    for (std::size_t k = 0; k < check.intervals.size(); ++k) {
      const auto& iv = check.intervals[k];
      b["intervals"].push_back({{"start", iv.start},
                                {"end", iv.end},
                                {"spectral_radius", iv.spectral_radius},
                                {"kappa", iv.kappa},
                                {"vacuous", iv.vacuous},
                                {"passed", iv.passed},
                                {"empirical_constant", iv.empirical_constant}});
      io.out << "bound on interval " << k + 1 << ": " << (iv.passed ? "pass" : "FAIL")
             << "  kappa " << fixed(iv.kappa, 6) << "  empirical C " << fixed(iv.empirical_constant, 6)
             << (iv.vacuous ? "  (vacuous)" : "") << "\n";
    }
    write_text_file(out_dir / "bound.json", b.dump(2) + "\n");
    io.out << "convergence bound (safety " << o.safety << "): " << (check.passed ? "pass" : "FAIL")
           << "\n";
  }
}

void analyze_fit(const AnalyzeOptions& o, const fs::path& out_dir, Streams io,
                 RunManifest& manifest) {
  if (o.verify_bound) throw UsageError("--verify-bound needs --params (a full parameter set)");
  const auto fits = fits_from_json(read_text_file(o.fit), o.fit);
  manifest.inputs = {o.fit};
  json doc{{"windows", json::array()}};
  for (const auto& f : fits) {
    const Eigen::VectorXd alpha = f.alpha_hat();
    const double rho = alpha.size() ? alpha.maxCoeff() / f.beta : 0.0;
    const StabilityRegime regime = classify(rho);
    json w{{"window", {f.window.start, f.window.end}},
           {"spectral_radius", rho},
           {"regime", std::string(to_string(regime))}};
    io.out << "window [" << f.window.start << ", " << f.window.end << ")  spectral radius "
           << fixed(rho, 6) << " (" << to_string(regime) << ")";
    if (regime == StabilityRegime::kSubcritical) {
      const Eigen::VectorXd stationary = stationary_intensity(f, o.tie_mu_wc);
      const auto b = instantaneous_bias(stationary, f.groups);
      w["kappa_bound"] = f.beta * (1.0 - rho);
      w["stationary"] = to_json(stationary);
      w["b_star_inst"] = optional_json(b);
      io.out << "  B*_inst " << (b ? fixed(*b, 6) : std::string("undefined"));
    } else {
      w["stationary"] = nullptr;
    }
    io.out << "\n";
    doc["windows"].push_back(w);
  }
  write_text_file(out_dir / "stability.json", doc.dump(2) + "\n");
  if (!o.log.empty()) {
    const EventLog log = read_event_log(o.log);
    manifest.inputs.push_back(o.log);
    const auto times = grid(log.horizon(), o.grid_step);
    write_file(out_dir / "bias_window.csv", [&](std::ostream& s) {
      write_bias_series_csv(s, window_bias_series(log, fits, times, o.tie_mu_wc));
    });
  }
}

// ---------------------------------------------------------------- netsim

struct NetsimOptions {
  std::string config;
  std::vector<std::string> policies;
  std::vector<int> retrain;
  std::optional<std::uint64_t> seed;
  std::size_t replicates = 1;
  unsigned jobs = 1;
};

struct RunSummary {
  double b_star = 0.0;
  std::optional<double> dp_gap;
  std::optional<double> b_emp_end;
  Eigen::VectorXd alpha;
  std::vector<std::pair<Window, std::optional<double>>> window_b_star;
};

struct ComboResult {
  std::string policy;
  int retrain = 0;
  std::vector<RunSummary> runs;  // one per replicate
};

void validate_policy(const std::string& name) {
  const auto& names = builtin_policy_names();
  if (std::find(names.begin(), names.end(), name) != names.end()) return;
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
  throw UsageError("unknown policy \"" + name + "\"; builtin policies: " + list);
}

json window_fit_json(const DiagonalFit& f) { return json::parse(fit_to_json(f)); }

RunSummary run_one(const NetsimConfig& cfg, const SimConfig& sim, const NetsimRun& pre,
                   const std::string& policy, const fs::path& dir) {
  auto pol = make_policy(policy, cfg.policy_options);
  const NetsimRun run = run_lp_phase(pre, *pol, sim);
  const NetsimAnalysis a = analyze_run(run, sim, cfg.beta, cfg.tie_mu);

  write_file(dir / "edges.csv", [&](std::ostream& s) { write_edges_csv(s, run.graph); });
  write_event_log_jsonl(dir / "events.jsonl", run.log);
  write_file(dir / "audit.csv", [&](std::ostream& s) { write_audit_csv(s, run); });

  RunSummary out{a.b_star, a.dp_gap, a.b_emp_end, a.lp_fit.alpha_hat(), {}};
  json windows = json::array();
  for (std::size_t k = 0; k < a.window_fits.size(); ++k) {
    json w = window_fit_json(a.window_fits[k]);
    w["b_star_inst"] = optional_json(a.window_b_star[k]);
    windows.push_back(w);
    out.window_b_star.emplace_back(a.window_fits[k].window, a.window_b_star[k]);
  }
  const json report{{"policy", policy},
                    {"retrain_period", sim.retrain_period},
                    {"seed", sim.seed},
                    {"edges", run.graph.edge_count()},
                    {"events", run.log.size()},
                    {"mu_pre", to_json(a.mu_pre)},
                    {"lp_fit", window_fit_json(a.lp_fit)},
                    {"b_star_inst", a.b_star},
                    {"dp_gap", optional_json(a.dp_gap)},
                    {"b_emp_end", optional_json(a.b_emp_end)},
                    {"windows", windows}};
  write_text_file(dir / "report.json", report.dump(2) + "\n");
  return out;
}

double mean_of(const std::vector<RunSummary>& runs, double RunSummary::*field) {
  double s = 0.0;
  for (const auto& r : runs) s += r.*field;
  return s / static_cast<double>(runs.size());
}

std::optional<double> mean_optional(const std::vector<RunSummary>& runs,
                                     std::optional<double> RunSummary::*field) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : runs) {
    if (r.*field) {
      s += *(r.*field);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

// Mean alpha_hat over within pairs and over cross pairs for one replicate set.
std::pair<double, double> mean_alpha_split(const std::vector<RunSummary>& runs, int groups) {
  const PairIndex index(groups);
  double w = 0.0;
  double c = 0.0;
  for (const auto& r : runs) {
    for (int p = 0; p < index.size(); ++p) (index.is_within(p) ? w : c) += r.alpha(p);
  }
  const double n = static_cast<double>(runs.size());
  const int cross = index.size() - groups;
  return {w / (n * groups), cross > 0 ? c / (n * cross) : 0.0};
}

std::vector<ComboResult> netsim_sweep(const NetsimConfig& cfg, std::vector<std::string> policies,
                                      std::vector<int> retrain, std::uint64_t seed,
                                      std::size_t replicates, unsigned jobs, const fs::path& out_dir,
                                      bool flat_layout) {
  for (const auto& p : policies) validate_policy(p);
  for (int l : retrain) {
    if (l < 0) throw UsageError("--retrain values must be nonnegative");
  }
  std::vector<ComboResult> combos;
  for (const auto& p : policies) {
    for (int l : retrain) combos.push_back({p, l, std::vector<RunSummary>(replicates)});
  }
  parallel_for(replicates, jobs, [&](std::size_t r) {
    SimConfig sim = cfg.sim;
    sim.seed = seed + r;
    const NetsimRun pre = generate_pre_network(sim);
    for (auto& combo : combos) {
      SimConfig s = sim;
      s.retrain_period = combo.retrain;
      fs::path dir = out_dir;
      if (!flat_layout) dir /= combo.policy + "_L" + std::to_string(combo.retrain);
      if (replicates > 1) dir /= replicate_dir(r);
      combo.runs[r] = run_one(cfg, s, pre, combo.policy, dir);
    }
  });
  return combos;
}

void write_comparison(const fs::path& path, const std::vector<ComboResult>& combos, int groups) {
  write_file(path, [&](std::ostream& s) {
    s << "policy,retrain_period,replicates,b_star_inst,dp_gap,b_emp_end,alpha_within,alpha_cross\n";
    for (const auto& c : combos) {
      const auto [aw, ac] = mean_alpha_split(c.runs, groups);
      s << c.policy << ',' << c.retrain << ',' << c.runs.size() << ','
        << format_double(mean_of(c.runs, &RunSummary::b_star)) << ','
        << format_optional(mean_optional(c.runs, &RunSummary::dp_gap)) << ','
        << format_optional(mean_optional(c.runs, &RunSummary::b_emp_end)) << ','
        << format_double(aw) << ',' << format_double(ac) << '\n';
    }
  });
}

void print_ordering(std::ostream& out, const std::vector<ComboResult>& combos) {
  std::vector<std::size_t> order(combos.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mean_of(combos[a].runs, &RunSummary::b_star) > mean_of(combos[b].runs, &RunSummary::b_star);
  });
  out << "B*_inst ordering:";
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& c = combos[order[k]];
    out << (k ? " >" : "") << ' ' << c.policy << "(L=" << c.retrain << ") "
        << fixed(mean_of(c.runs, &RunSummary::b_star));
  }
  out << "\n";
  for (const auto& c : combos) {
    const auto dp = mean_optional(c.runs, &RunSummary::dp_gap);
    out << "  " << c.policy << " L=" << c.retrain << "  B*_inst "
        << fixed(mean_of(c.runs, &RunSummary::b_star)) << "  dp_gap "
        << (dp ? fixed(*dp, 5) : std::string("undefined")) << "\n";
  }
}

void cmd_netsim(const NetsimOptions& o, const fs::path& out_dir, Streams io, RunManifest& manifest) {
  const NetsimConfig cfg = parse_netsim_config(read_text_file(o.config), o.config);
  const auto policies = o.policies.empty() ? std::vector<std::string>{cfg.policy} : o.policies;
  const auto retrain = o.retrain.empty() ? std::vector<int>{cfg.sim.retrain_period} : o.retrain;
  const std::uint64_t seed = o.seed.value_or(cfg.sim.seed);
  manifest.config = cfg.snapshot;
  manifest.seed = seed;
  manifest.inputs = {o.config};
  const bool flat = policies.size() * retrain.size() == 1;
  const auto combos =
      netsim_sweep(cfg, policies, retrain, seed, o.replicates, o.jobs, out_dir, flat);
  write_comparison(out_dir / "comparison.csv", combos, cfg.sim.groups);
  print_ordering(io.out, combos);
}

// ---------------------------------------------------------------- reproduce

struct ReproduceOptions {
  std::string experiment;
  std::size_t seeds = 10;
  unsigned jobs = 1;
};

HawkesConfig builtin_hawkes(std::string_view text, const char* name) {
  return parse_hawkes_config(std::string(text), name);
}

std::vector<DiagonalFit> fit_three_regime(const EventLog& log, const HawkesConfig& cfg) {
  return estimate_windowed(log, std::span(cfg.schedule->starts()).subspan(1));
}

void reproduce_bias_tracking(const fs::path& out_dir, Streams io, RunManifest& manifest) {
  const HawkesConfig cfg = builtin_hawkes(builtin::kThreeRegime, "three_regime.json");
  manifest.config = cfg.snapshot;
  manifest.seed = cfg.seed;
  const double horizon = *cfg.horizon;
  const EventLog log = simulate(cfg.params, &*cfg.schedule, horizon, cfg.seed, cfg.mode);
  write_event_log_jsonl(out_dir / "events.jsonl", log);
  const auto fits = fit_three_regime(log, cfg);
  write_text_file(out_dir / "fits.json", fits_to_json(fits));

  const auto times = grid(horizon, 1.0);
  const auto traj = integrate_meanfield(cfg.params, &*cfg.schedule, horizon, default_step(1.0));
  write_file(out_dir / "bias_window.csv",
             [&](std::ostream& s) { write_bias_series_csv(s, window_bias_series(log, fits, times)); });
  write_file(out_dir / "bias_meanfield.csv",
             [&](std::ostream& s) { write_bias_series_csv(s, meanfield_bias_series(log, traj, times)); });
  write_file(out_dir / "bias_conditional.csv", [&](std::ostream& s) {
    write_bias_series_csv(s, conditional_bias_series(log, cfg.params, &*cfg.schedule, cfg.mode, times));
  });
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const HawkesParams truth = cfg.params.with_excitation(cfg.schedule->matrix(k));
    io.out << "window " << k + 1 << "  B*_inst estimated " << fixed(stationary_bias(fits[k]))
           << "  oracle " << fixed(stationary_bias(truth)) << "\n";
  }
}

void reproduce_regime_table(const ReproduceOptions& o, const fs::path& out_dir, Streams io,
                       RunManifest& manifest) {
  const HawkesConfig cfg = builtin_hawkes(builtin::kThreeRegime, "three_regime.json");
  manifest.config = cfg.snapshot;
  manifest.seed = cfg.seed;
  std::vector<std::vector<DiagonalFit>> per_seed(o.seeds);
  parallel_for(o.seeds, o.jobs, [&](std::size_t r) {
    const EventLog log = simulate(cfg.params, &*cfg.schedule, *cfg.horizon, cfg.seed + r, cfg.mode);
    per_seed[r] = fit_three_regime(log, cfg);
  });
  std::vector<DiagonalFit> mean = per_seed.front();
  for (std::size_t w = 0; w < mean.size(); ++w) {
    for (std::size_t p = 0; p < mean[w].pairs.size(); ++p) {
      double mu = 0.0;
      double alpha = 0.0;
      for (const auto& fits : per_seed) {
        mu += fits[w].pairs[p].mu;
        alpha += fits[w].pairs[p].alpha;
      }
      mean[w].pairs[p].mu = mu / static_cast<double>(o.seeds);
      mean[w].pairs[p].alpha = alpha / static_cast<double>(o.seeds);
    }
  }
  Eigen::MatrixXd truth(cfg.params.pairs(), static_cast<Eigen::Index>(mean.size()));
  for (std::size_t w = 0; w < mean.size(); ++w) {
    truth.col(static_cast<Eigen::Index>(w)) = cfg.schedule->matrix(w).diagonal();
  }
  write_file(out_dir / "regime_table.csv", [&](std::ostream& s) { write_regime_table_csv(s, mean, truth); });
  const PairIndex index(cfg.params.groups());
  write_file(out_dir / "per_seed.csv", [&](std::ostream& s) {
    s << "seed,window,pair,mu_hat,alpha_hat,flag\n";
    for (std::size_t r = 0; r < o.seeds; ++r) {
      for (std::size_t w = 0; w < per_seed[r].size(); ++w) {
        for (int p = 0; p < index.size(); ++p) {
          const auto& pf = per_seed[r][w].pairs[static_cast<std::size_t>(p)];
          s << cfg.seed + r << ',' << w + 1 << ",\"" << index.pair(p).to_string() << "\","
            << format_double(pf.mu) << ',' << format_double(pf.alpha) << ',' << to_string(pf.status)
            << '\n';
        }
      }
    }
  });
  io.out << "mean over " << o.seeds << " seeds\n";
  for (int p : {0, 2}) {
    io.out << "  " << index.pair(p).to_string() << "  alpha_hat";
    for (const auto& f : mean) io.out << ' ' << fixed(f.pairs[static_cast<std::size_t>(p)].alpha, 3);
    io.out << "  truth";
    for (Eigen::Index w = 0; w < truth.cols(); ++w) io.out << ' ' << fixed(truth(p, w), 2);
    io.out << "  mu_hat";
    for (const auto& f : mean) io.out << ' ' << fixed(f.pairs[static_cast<std::size_t>(p)].mu, 3);
    io.out << "\n";
  }
}

void reproduce_policy_sweep(const ReproduceOptions& o, const fs::path& out_dir, Streams io,
                    RunManifest& manifest) {
  const NetsimConfig cfg = parse_netsim_config(std::string(builtin::kNetsim), "netsim_three_groups.json");
  manifest.config = cfg.snapshot;
  manifest.seed = cfg.sim.seed;
  const std::vector<std::string> policies{"homophily-boost", "cosine-refit", "group-blind-random",
                                          "cross-boost"};
  const auto combos = netsim_sweep(cfg, policies, {0, cfg.sim.retrain_period}, cfg.sim.seed,
                                   o.seeds, o.jobs, out_dir / "runs", false);
  write_comparison(out_dir / "comparison.csv", combos, cfg.sim.groups);
  const PairIndex index(cfg.sim.groups);
  write_file(out_dir / "alpha_matrices.csv", [&](std::ostream& s) {
    s << "policy,retrain_period,pair,alpha_hat\n";
    for (const auto& c : combos) {
      for (int p = 0; p < index.size(); ++p) {
        double a = 0.0;
        for (const auto& r : c.runs) a += r.alpha(p);
        s << c.policy << ',' << c.retrain << ",\"" << index.pair(p).to_string() << "\","
          << format_double(a / static_cast<double>(c.runs.size())) << '\n';
      }
    }
  });
  write_file(out_dir / "bias_timeline.csv", [&](std::ostream& s) {
    s << "policy,retrain_period,window_start,window_end,b_star_inst\n";
    for (const auto& c : combos) {
      const auto& first = c.runs.front().window_b_star;
      for (std::size_t w = 0; w < first.size(); ++w) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : c.runs) {
          if (r.window_b_star[w].second) {
            sum += *r.window_b_star[w].second;
            ++n;
          }
        }
        s << c.policy << ',' << c.retrain << ',' << format_double(first[w].first.start) << ','
          << format_double(first[w].first.end) << ','
          << (n ? format_double(sum / static_cast<double>(n)) : std::string{}) << '\n';
      }
    }
  });
  print_ordering(io.out, combos);
}

void reproduce_meanfield(std::string_view text, const char* name, bool verify, const fs::path& out_dir,
                        Streams io, RunManifest& manifest) {
  // Reuse the analyze path on a temporary copy of the builtin config.
  const fs::path cfg_path = out_dir / name;
  write_text_file(cfg_path, std::string(text));
  AnalyzeOptions a;
  a.params = cfg_path.string();
  a.verify_bound = verify;
  if (!verify) a.horizon = 50.0;  // trajectory to equilibrium, not the simulation horizon
  analyze_params(a, out_dir, io, manifest);
  manifest.inputs.clear();
}

void cmd_reproduce(const ReproduceOptions& o, const fs::path& out_dir, Streams io,
                   RunManifest& manifest) {
  if (o.experiment == "bias-tracking") reproduce_bias_tracking(out_dir, io, manifest);
  else if (o.experiment == "regime-table") reproduce_regime_table(o, out_dir, io, manifest);
  else if (o.experiment == "policy-sweep") reproduce_policy_sweep(o, out_dir, io, manifest);
  else if (o.experiment == "two-group") reproduce_meanfield(builtin::kTwoGroup, "two_group.json", false, out_dir, io, manifest);
  else if (o.experiment == "bound") reproduce_meanfield(builtin::kSwitching, "switching_schedule.json", true, out_dir, io, manifest);
  else throw UsageError("unknown experiment id \"" + o.experiment + "\" (bias-tracking, regime-table, two-group, bound, policy-sweep)");
}

// ---------------------------------------------------------------- dispatch

std::vector<std::string> without_out(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--out" || args[k] == "-o") {
      ++k;
      continue;
    }
    if (args[k].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[k]);
  }
  return kept;
}

int map_exception(std::ostream& err) {
  try {
    throw;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NonStationaryError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IllConditionedError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConvergenceError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group-pair Hawkes simulation, estimation and bias analysis", "homophily"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());
  std::string out_opt;

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("-o,--out", out_opt,
                    "Output directory (default $HOMOPHILY_OUT/<command>, else ./homophily-out/<command>)");
  };

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a group-pair Hawkes event log");
  simulate_cmd->add_option("-c,--config", sim.config, "Hawkes parameter config (JSON)")->required();
  simulate_cmd->add_option("--horizon", sim.horizon, "Override the config horizon")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim.seed, "Override the config seed");
  simulate_cmd->add_option("--format", sim.format, "Log format")->check(CLI::IsMember({"jsonl", "csv"}));
  simulate_cmd->add_option("--replicates", sim.replicates, "Independent replicates")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--jobs", sim.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_out(simulate_cmd);

  EstimateOptions est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Windowed diagonal MLE on an event log");
  estimate_cmd->add_option("-l,--log", est.log, "Event log (.jsonl, or .csv with sidecar)")->required();
  estimate_cmd->add_option("--breakpoints", est.breakpoints, "Interior window breakpoints")->delimiter(',');
  estimate_cmd->add_option("--beta", est.beta, "Kernel decay (fixed)")->check(CLI::PositiveNumber);
  estimate_cmd->add_option("--baseline", est.baseline, "Baseline mode")
      ->check(CLI::IsMember({"joint", "closed-form"}));
  estimate_cmd->add_option("--mu-from-window", est.mu_from_window,
                           "Hold mu at N/T measured on START,END")->delimiter(',')->expected(2);
  estimate_cmd->add_flag("--tie-mu-wc", est.tie_mu_wc, "Equalise within and cross baseline totals");
  estimate_cmd->add_option("--min-events", est.min_events, "Low-data threshold per pair");
  estimate_cmd->add_option("--truth", est.truth, "Config with the true schedule for the regime table");
  add_out(estimate_cmd);

  AnalyzeOptions ana;
  auto* analyze_cmd = app.add_subcommand("analyze", "Stability, mean-field and bias diagnostics");
  auto* params_opt = analyze_cmd->add_option("-p,--params", ana.params, "Hawkes parameter config");
  auto* fit_opt = analyze_cmd->add_option("-f,--fit", ana.fit, "fits.json from estimate");
  params_opt->excludes(fit_opt);
  analyze_cmd->add_option("-l,--log", ana.log, "Event log for empirical bias series");
  analyze_cmd->add_option("--horizon", ana.horizon, "Trajectory horizon")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--step", ana.step, "RK4 step")->check(CLI::PositiveNumber);
  analyze_cmd->add_flag("--verify-bound", ana.verify_bound, "Check the exponential convergence bound");
  analyze_cmd->add_option("--safety", ana.safety, "Safety factor on the rate")
      ->check(CLI::Range(0.0, 1.0));
  analyze_cmd->add_option("--grid-step", ana.grid_step, "Bias series spacing")->check(CLI::PositiveNumber);
  analyze_cmd->add_flag("--tie-mu-wc", ana.tie_mu_wc, "Equalise within and cross baselines (fits)");
  add_out(analyze_cmd);

  NetsimOptions net;
  auto* netsim_cmd = app.add_subcommand("netsim", "Agent-based network simulation with a recommender");
  netsim_cmd->add_option("-c,--config", net.config, "netsim config (JSON)")->required();
  netsim_cmd->add_option("--policy", net.policies, "Policy name(s)")->delimiter(',');
  netsim_cmd->add_option("--retrain", net.retrain, "Retrain period(s) in steps; 0 = never")->delimiter(',');
  netsim_cmd->add_option("--seed", net.seed, "Override the config seed");
  netsim_cmd->add_option("--replicates", net.replicates, "Seeds seed, seed+1, ...")->check(CLI::PositiveNumber);
  netsim_cmd->add_option("--jobs", net.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_out(netsim_cmd);

  ReproduceOptions rep;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Regenerate the plot data for a named experiment");
  reproduce_cmd->add_option("experiment", rep.experiment, "bias-tracking | regime-table | two-group | bound | policy-sweep")->required();
  reproduce_cmd->add_option("--seeds", rep.seeds, "Seeds to average (regime-table, policy-sweep)")->check(CLI::PositiveNumber);
  reproduce_cmd->add_option("--jobs", rep.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_out(reproduce_cmd);

  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_path, "manifest.json")->required();
  add_out(replay_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (replay_cmd->parsed()) {
      const RunManifest m = read_manifest(manifest_path);
      std::vector<std::string> again{m.command};
      again.insert(again.end(), m.argv.begin(), m.argv.end());
      again.push_back("--out");
      again.push_back(out_opt.empty() ? m.out_dir.string() : out_opt);
      return run(again, out, err);
    }

    CLI::App* sub = app.get_subcommands().front();
    if (analyze_cmd->parsed() && ana.params.empty() && ana.fit.empty()) {
      throw UsageError("analyze needs --params or --fit");
    }
    const std::string leaf = sub == reproduce_cmd ? rep.experiment : sub->get_name();
    const fs::path out_dir = out_opt.empty() ? default_output_root() / leaf : fs::path(out_opt);

    RunManifest manifest;
    manifest.command = sub->get_name();
    manifest.argv = without_out({args.begin() + 1, args.end()});
    manifest.out_dir = out_dir;
    Stopwatch clock;
    const Streams io{out, err};

    if (sub == simulate_cmd) cmd_simulate(sim, out_dir, io, manifest);
    else if (sub == estimate_cmd) cmd_estimate(est, out_dir, io, manifest);
    else if (sub == analyze_cmd && !ana.params.empty()) analyze_params(ana, out_dir, io, manifest);
    else if (sub == analyze_cmd) analyze_fit(ana, out_dir, io, manifest);
    else if (sub == netsim_cmd) cmd_netsim(net, out_dir, io, manifest);
    else if (sub == reproduce_cmd) cmd_reproduce(rep, out_dir, io, manifest);

    manifest.wall_clock_seconds = clock.seconds();
    write_manifest(manifest);
    out << "outputs in " << out_dir.string() << "\n";
    return kExitOk;
  } catch (...) {
    return map_exception(err);
  }
}

}  // namespace homophily::cli
