#include "config.hpp"

#include <algorithm>
#include <regex>

namespace homophily::cli {

using nlohmann::json;

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                                  : source + ": " + message),
      line_(line) {}

namespace {

std::size_t line_at_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

ConfigDocument::ConfigDocument(std::string text, std::string source)
    : text_(std::move(text)), source_(std::move(source)) {
  try {
    root_ = json::parse(text_);
  } catch (const json::parse_error& e) {
    // byte is 1-based and points just past the offending character
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError(source_, line_at_offset(text_, offset), what);
  }
  if (!root_.is_object()) throw ConfigError(source_, 1, "configuration must be a JSON object");
}

const json& ConfigDocument::at(const std::string& key) {
  auto it = root_.find(key);
  if (it == root_.end()) throw ConfigError(source_, 0, "missing required key \"" + key + "\"");
  used_.insert(key);
  return *it;
}

std::size_t ConfigDocument::line_of(const std::string& key) const {
  const std::regex pattern("\"" + std::regex_replace(key, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") + "\"\\s*:");
  std::smatch m;
  if (std::regex_search(text_, m, pattern)) {
    return line_at_offset(text_, static_cast<std::size_t>(m.position(0)));
  }
  return 0;
}

void ConfigDocument::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(source_, line_of(key), "key \"" + key + "\" " + message);
}

void ConfigDocument::reject_unknown() const {
  for (const auto& [key, _] : root_.items()) {
    if (!used_.contains(key)) fail(key, "is not a recognised setting");
  }
}

const std::vector<std::string>& hawkes_config_keys() {
  static const std::vector<std::string> keys{
      "description", "K",        "mu",      "beta",  "excitation", "alpha",    "breakpoints",
      "schedule",    "alpha_schedule", "regime_mode", "horizon", "seed", "step"};
  return keys;
}

const std::vector<std::string>& netsim_config_keys() {
  static const std::vector<std::string> keys{
      "description",     "n_nodes",         "groups",          "prob_matrix",
      "activity_rate",   "top_probs",       "popularity_low",  "popularity_high",
      "latent_clusters", "cluster_noise",   "embedding_dim",   "retrain_period",
      "horizon_pre",     "horizon_lp",      "pre_temperature", "softmax_temperature",
      "exclude_adjacent", "multi_edge",     "seed",            "policy",
      "group_bonus",     "beta",            "tie_mu"};
  return keys;
}

RegimeMode parse_regime_mode(const std::string& name) {
  if (name == "reweight-past") return RegimeMode::kReweightPast;
  if (name == "future-only") return RegimeMode::kFutureOnly;
  throw std::invalid_argument("unknown regime mode \"" + name +
                              "\" (expected reweight-past or future-only)");
}

std::string to_string(RegimeMode mode) {
  return mode == RegimeMode::kReweightPast ? "reweight-past" : "future-only";
}

namespace {

Eigen::VectorXd vector_of(ConfigDocument& doc, const std::string& key, const json& value,
                          int expected) {
  if (!value.is_array() || static_cast<int>(value.size()) != expected) {
    doc.fail(key, "must be an array of " + std::to_string(expected) + " numbers");
  }
  Eigen::VectorXd out(expected);
  for (int k = 0; k < expected; ++k) {
    const auto& x = value[static_cast<std::size_t>(k)];
    if (!x.is_number()) doc.fail(key, "must contain only numbers");
    out(k) = x.get<double>();
  }
  return out;
}

Eigen::MatrixXd matrix_of(ConfigDocument& doc, const std::string& key, const json& value, int n) {
  if (!value.is_array() || static_cast<int>(value.size()) != n) {
    doc.fail(key, "must be a " + std::to_string(n) + " x " + std::to_string(n) + " nested array");
  }
  Eigen::MatrixXd out(n, n);
  for (int r = 0; r < n; ++r) out.row(r) = vector_of(doc, key, value[static_cast<std::size_t>(r)], n);
  return out;
}

std::uint64_t seed_of(ConfigDocument& doc) {
  const auto& v = doc.at("seed");
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    doc.fail("seed", "must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

template <typename F>
auto checked(ConfigDocument& doc, const std::string& key, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    doc.fail(key, std::string("is invalid: ") + e.what());
  }
}

}  // namespace

HawkesConfig parse_hawkes_config(const std::string& text, const std::string& source) {
  ConfigDocument doc(text, source);
  const int groups = doc.get<int>("K");
  if (groups < 1) doc.fail("K", "must be a positive integer");
  const int g = pair_count(groups);
  const Eigen::VectorXd mu = vector_of(doc, "mu", doc.at("mu"), g);
  const double beta = doc.get_or<double>("beta", 1.0);

  if (doc.has("excitation") && doc.has("alpha")) doc.fail("alpha", "conflicts with \"excitation\"");
  Eigen::MatrixXd excitation = Eigen::MatrixXd::Zero(g, g);
  if (doc.has("excitation")) excitation = matrix_of(doc, "excitation", doc.at("excitation"), g);
  if (doc.has("alpha")) excitation = vector_of(doc, "alpha", doc.at("alpha"), g).asDiagonal();

  std::string params_key = doc.has("excitation") ? "excitation" : doc.has("alpha") ? "alpha" : "mu";
  HawkesConfig out(
      checked(doc, params_key, [&] { return HawkesParams(groups, mu, excitation, beta); }));
  out.description = doc.get_or<std::string>("description", "");

  if (doc.has("schedule") && doc.has("alpha_schedule")) {
    doc.fail("alpha_schedule", "conflicts with \"schedule\"");
  }
  const bool scheduled = doc.has("schedule") || doc.has("alpha_schedule");
  if (doc.has("breakpoints") != scheduled) {
    doc.fail(doc.has("breakpoints") ? "breakpoints" : (doc.has("schedule") ? "schedule" : "alpha_schedule"),
             "requires both \"breakpoints\" and a schedule");
  }
  if (scheduled) {
    const auto breakpoints = doc.get<std::vector<double>>("breakpoints");
    const std::string key = doc.has("schedule") ? "schedule" : "alpha_schedule";
    const auto& list = doc.at(key);
    if (!list.is_array() || list.size() != breakpoints.size() + 1) {
      doc.fail(key, "must hold one entry per interval (breakpoints + 1)");
    }
    std::vector<Eigen::MatrixXd> matrices;
    for (const auto& entry : list) {
      if (key == "schedule") matrices.push_back(matrix_of(doc, key, entry, g));
      else matrices.push_back(vector_of(doc, key, entry, g).asDiagonal());
    }
    out.schedule.emplace(checked(doc, key, [&] {
      return RegimeSchedule::from_breakpoints(breakpoints, std::move(matrices));
    }));
    if (!doc.has("excitation") && !doc.has("alpha")) {
      out.params = out.params.with_excitation(out.schedule->matrix(0));
    }
  }
  if (doc.has("regime_mode")) {
    out.mode = checked(doc, "regime_mode",
                       [&] { return parse_regime_mode(doc.get<std::string>("regime_mode")); });
  }
  if (doc.has("horizon")) {
    const double h = doc.get<double>("horizon");
    if (!(h > 0.0)) doc.fail("horizon", "must be positive");
    out.horizon = h;
    if (out.schedule) {
      checked(doc, "breakpoints", [&] {
        out.schedule->validate_against(h, g);
        return 0;
      });
    }
  }
  if (doc.has("seed")) out.seed = seed_of(doc);
  if (doc.has("step")) {
    const double s = doc.get<double>("step");
    if (!(s > 0.0)) doc.fail("step", "must be positive");
    out.step = s;
  }
  doc.reject_unknown();
  out.snapshot = doc.root();
  return out;
}

NetsimConfig parse_netsim_config(const std::string& text, const std::string& source) {
  ConfigDocument doc(text, source);
  NetsimConfig out;
  SimConfig& c = out.sim;
  c.n_nodes = doc.get_or("n_nodes", c.n_nodes);
  c.groups = doc.get_or("groups", c.groups);
  if (doc.has("prob_matrix")) {
    c.prob_matrix = doc.get<std::vector<std::vector<double>>>("prob_matrix");
  } else if (c.groups != 3) {
    doc.fail("groups", "requires an explicit \"prob_matrix\" when not 3");
  }
  c.activity_rate = doc.get_or("activity_rate", c.activity_rate);
  if (doc.has("top_probs")) {
    const auto tp = doc.get<std::vector<double>>("top_probs");
    if (tp.size() != 3) doc.fail("top_probs", "must have exactly 3 entries");
    std::copy(tp.begin(), tp.end(), c.top_probs.begin());
  }
  c.popularity_low = doc.get_or("popularity_low", c.popularity_low);
  c.popularity_high = doc.get_or("popularity_high", c.popularity_high);
  c.latent_clusters = doc.get_or("latent_clusters", c.latent_clusters);
  c.cluster_noise = doc.get_or("cluster_noise", c.cluster_noise);
  c.embedding_dim = doc.get_or("embedding_dim", c.embedding_dim);
  c.retrain_period = doc.get_or("retrain_period", c.retrain_period);
  c.horizon_pre = doc.get_or("horizon_pre", c.horizon_pre);
  c.horizon_lp = doc.get_or("horizon_lp", c.horizon_lp);
  c.pre_temperature = doc.get_or("pre_temperature", c.pre_temperature);
  c.softmax_temperature = doc.get_or("softmax_temperature", c.softmax_temperature);
  c.exclude_adjacent = doc.get_or("exclude_adjacent", c.exclude_adjacent);
  c.multi_edge = doc.get_or("multi_edge", c.multi_edge);
  if (doc.has("seed")) c.seed = seed_of(doc);
  out.policy = doc.get_or<std::string>("policy", out.policy);
  out.policy_options.group_bonus = doc.get_or("group_bonus", out.policy_options.group_bonus);
  out.policy_options.embedding_dim = c.embedding_dim;
  out.beta = doc.get_or("beta", out.beta);
  if (!(out.beta > 0.0)) doc.fail("beta", "must be positive");
  out.tie_mu = doc.get_or("tie_mu", out.tie_mu);
  out.description = doc.get_or<std::string>("description", "");
  doc.reject_unknown();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    // the message begins with the offending field name
    const std::string what = e.what();
    const std::string key = what.substr(0, what.find(' '));
    throw ConfigError(source, doc.line_of(key), what);
  }
  out.snapshot = doc.root();
  return out;
}

}  // namespace homophily::cli
