#include "homophily/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace homophily {

using nlohmann::json;

FormatError::FormatError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                                  : source + ": " + message),
      line_(line) {}

std::string format_double(double value) {
  if (!std::isfinite(value)) throw std::domain_error("refusing to format a non-finite value");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
  return std::string(buf, end);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string{};
}

namespace {

json number_array(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v(k))) throw std::domain_error("refusing to serialise a non-finite value");
    out.push_back(v(k));
  }
  return out;
}

double finite(double v) {
  if (!std::isfinite(v)) throw std::domain_error("refusing to serialise a non-finite value");
  return v;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t first = 0;
  while (first < s.size() && (s[first] == ' ' || s[first] == '\t')) ++first;
  return s.substr(first);
}

// Reads a required member; throws FormatError naming the key.
template <typename T>
T member(const json& obj, const char* key, const std::string& source, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(source, line, std::string("missing key \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError(source, line, std::string("key \"") + key + "\" has the wrong type");
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& source, std::size_t line) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw FormatError(source, line, "unknown key \"" + key + "\"");
  }
}

EventLog header_log(const json& header, const std::string& source, std::size_t line) {
  if (!header.is_object()) throw FormatError(source, line, "header must be a JSON object");
  check_keys(header, {"K", "horizon"}, source, line);
  const int k = member<int>(header, "K", source, line);
  const double horizon = member<double>(header, "horizon", source, line);
  try {
    return EventLog(k, horizon);
  } catch (const std::invalid_argument& e) {
    throw FormatError(source, line, e.what());
  }
}

void append_event(EventLog& log, double t, int i, int j, const std::string& source,
                  std::size_t line) {
  try {
    if (i < 1 || j < 1 || i > log.groups() || j > log.groups()) {
      throw std::invalid_argument("group index out of range 1.." + std::to_string(log.groups()));
    }
    log.append(t, GroupPair(i, j));
  } catch (const std::invalid_argument& e) {
    throw FormatError(source, line, e.what());
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

void write_event_log_jsonl(std::ostream& out, const EventLog& log) {
  out << "{\"K\":" << log.groups() << ",\"horizon\":" << format_double(log.horizon()) << "}\n";
  const PairIndex index = log.index();
  for (const Event& e : log.events()) {
    const GroupPair p = index.pair(e.mark);
    out << "{\"t\":" << format_double(e.t) << ",\"i\":" << p.i() << ",\"j\":" << p.j() << "}\n";
  }
}

EventLog read_event_log_jsonl(std::istream& in, const std::string& source) {
  std::string text;
  std::size_t line_no = 0;
  std::optional<EventLog> log;
  while (std::getline(in, text)) {
    ++line_no;
    text = trim(text);
    if (text.empty()) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!log) {
      log.emplace(header_log(obj, source, line_no));
      continue;
    }
    if (!obj.is_object()) throw FormatError(source, line_no, "event must be a JSON object");
    check_keys(obj, {"t", "i", "j"}, source, line_no);
    append_event(*log, member<double>(obj, "t", source, line_no),
                 member<int>(obj, "i", source, line_no), member<int>(obj, "j", source, line_no),
                 source, line_no);
  }
  if (!log) throw FormatError(source, 0, "missing header line {\"K\", \"horizon\"}");
  return std::move(*log);
}

void write_event_log_jsonl(const std::filesystem::path& path, const EventLog& log) {
  write_file(path, [&](std::ostream& out) { write_event_log_jsonl(out, log); });
}

EventLog read_event_log_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_event_log_jsonl(in, path.string());
}

void write_event_log_csv(const std::filesystem::path& path, const EventLog& log) {
  write_file(path, [&](std::ostream& out) {
    out << "t,i,j\n";
    const PairIndex index = log.index();
    for (const Event& e : log.events()) {
      const GroupPair p = index.pair(e.mark);
      out << format_double(e.t) << ',' << p.i() << ',' << p.j() << '\n';
    }
  });
  write_text_file(path.string() + ".meta.json",
                  "{\"K\":" + std::to_string(log.groups()) +
                      ",\"horizon\":" + format_double(log.horizon()) + "}\n");
}

EventLog read_event_log_csv(const std::filesystem::path& path) {
  const std::string meta_path = path.string() + ".meta.json";
  json meta;
  try {
    meta = json::parse(read_text_file(meta_path));
  } catch (const json::parse_error& e) {
    throw FormatError(meta_path, 0, std::string("invalid JSON: ") + e.what());
  }
  EventLog log = header_log(meta, meta_path, 0);

  auto in = open_input(path);
  const std::string source = path.string();
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    text = trim(text);
    if (text.empty()) continue;
    if (line_no == 1) {
      if (text != "t,i,j") throw FormatError(source, 1, "expected header t,i,j");
      continue;
    }
    std::stringstream row(text);
    std::string field[3];
    for (auto& f : field) std::getline(row, f, ',');
    std::string extra;
    if (std::getline(row, extra, ',')) throw FormatError(source, line_no, "expected 3 fields");
    double t = 0.0;
    int i = 0;
    int j = 0;
    auto parse = [&](const std::string& s, auto& value) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc{} || p != s.data() + s.size()) {
        throw FormatError(source, line_no, "cannot parse field \"" + s + "\"");
      }
    };
    parse(field[0], t);
    parse(field[1], i);
    parse(field[2], j);
    append_event(log, t, i, j, source, line_no);
  }
  return log;
}

EventLog read_event_log(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return read_event_log_csv(path);
  return read_event_log_jsonl(path);
}

namespace {

json fit_json(const DiagonalFit& fit) {
  json flags = json::array();
  for (const auto& p : fit.pairs) flags.push_back(std::string(to_string(p.status)));
  return json{{"window", {finite(fit.window.start), finite(fit.window.end)}},
              {"K", fit.groups},
              {"mu_hat", number_array(fit.mu_hat())},
              {"alpha_hat", number_array(fit.alpha_hat())},
              {"beta", finite(fit.beta)},
              {"loglik", number_array(fit.log_likelihood())},
              {"flags", flags}};
}

FitStatus parse_status(const std::string& s, const std::string& source) {
  for (FitStatus st : {FitStatus::kOk, FitStatus::kLowData, FitStatus::kNotConverged,
                       FitStatus::kInvalidBaseline}) {
    if (to_string(st) == s) return st;
  }
  throw FormatError(source, 0, "unknown fit flag \"" + s + "\"");
}

DiagonalFit parse_fit(const json& obj, const std::string& source) {
  if (!obj.is_object()) throw FormatError(source, 0, "fit must be a JSON object");
  check_keys(obj, {"window", "K", "mu_hat", "alpha_hat", "beta", "loglik", "flags"}, source, 0);
  DiagonalFit fit;
  const auto window = member<std::vector<double>>(obj, "window", source, 0);
  if (window.size() != 2) throw FormatError(source, 0, "window must be [start, end]");
  fit.window = {window[0], window[1]};
  fit.beta = member<double>(obj, "beta", source, 0);
  const auto mu = member<std::vector<double>>(obj, "mu_hat", source, 0);
  const auto alpha = member<std::vector<double>>(obj, "alpha_hat", source, 0);
  if (mu.size() != alpha.size()) throw FormatError(source, 0, "mu_hat and alpha_hat differ in length");
  fit.groups = obj.contains("K") ? member<int>(obj, "K", source, 0)
                                 : groups_for_pair_count(static_cast<int>(mu.size()));
  if (pair_count(fit.groups) != static_cast<int>(mu.size())) {
    throw FormatError(source, 0, "mu_hat length does not match K(K+1)/2");
  }
  std::vector<double> loglik(mu.size(), 0.0);
  if (obj.contains("loglik")) loglik = member<std::vector<double>>(obj, "loglik", source, 0);
  std::vector<std::string> flags(mu.size(), "ok");
  if (obj.contains("flags")) flags = member<std::vector<std::string>>(obj, "flags", source, 0);
  if (loglik.size() != mu.size() || flags.size() != mu.size()) {
    throw FormatError(source, 0, "loglik and flags must have one entry per pair");
  }
  for (std::size_t p = 0; p < mu.size(); ++p) {
    PairFit pf;
    pf.mu = mu[p];
    pf.alpha = alpha[p];
    pf.log_likelihood = loglik[p];
    pf.status = parse_status(flags[p], source);
    fit.pairs.push_back(pf);
  }
  return fit;
}

}  // namespace

std::string fit_to_json(const DiagonalFit& fit) { return fit_json(fit).dump(2) + "\n"; }

std::string fits_to_json(std::span<const DiagonalFit> fits) {
  json out = json::array();
  for (const auto& f : fits) out.push_back(fit_json(f));
  return out.dump(2) + "\n";
}

std::vector<DiagonalFit> fits_from_json(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(source, 0, std::string("invalid JSON: ") + e.what());
  }
  std::vector<DiagonalFit> out;
  if (doc.is_array()) {
    for (const auto& f : doc) out.push_back(parse_fit(f, source));
  } else {
    out.push_back(parse_fit(doc, source));
  }
  return out;
}

void write_regime_table_csv(std::ostream& out, std::span<const DiagonalFit> fits,
                            const std::optional<Eigen::MatrixXd>& true_alpha) {
  if (fits.empty()) return;
  const int groups = fits.front().groups;
  const PairIndex index(groups);
  const auto m = fits.size();
  if (true_alpha && (true_alpha->rows() != index.size() ||
                     static_cast<std::size_t>(true_alpha->cols()) != m)) {
    throw std::invalid_argument("true alpha table must be G x windows");
  }
  out << "pair";
  if (true_alpha) {
    for (std::size_t w = 1; w <= m; ++w) out << ",true_alpha_" << w;
  }
  for (std::size_t w = 1; w <= m; ++w) out << ",alpha_hat_" << w;
  for (std::size_t w = 1; w <= m; ++w) out << ",mu_hat_" << w;
  for (std::size_t w = 1; w <= m; ++w) out << ",flag_" << w;
  out << '\n';
  for (int p = 0; p < index.size(); ++p) {
    const auto pp = static_cast<std::size_t>(p);
    out << '"' << index.pair(p).to_string() << '"';
    if (true_alpha) {
      for (std::size_t w = 0; w < m; ++w) {
        out << ',' << format_double((*true_alpha)(p, static_cast<Eigen::Index>(w)));
      }
    }
    for (const auto& f : fits) out << ',' << format_double(f.pairs[pp].alpha);
    for (const auto& f : fits) out << ',' << format_double(f.pairs[pp].mu);
    for (const auto& f : fits) out << ',' << to_string(f.pairs[pp].status);
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const MeanFieldTrajectory& trajectory, int groups) {
  const PairIndex index(groups);
  out << "t";
  for (int p = 0; p < index.size(); ++p) {
    const GroupPair g = index.pair(p);
    out << ",lambda_" << g.i() << '_' << g.j();
  }
  out << '\n';
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    out << format_double(trajectory.times[k]);
    const auto& v = trajectory.values[k];
    for (Eigen::Index p = 0; p < v.size(); ++p) out << ',' << format_double(v(p));
    out << '\n';
  }
}

std::string stability_report_to_json(const StabilityReport& report, int groups) {
  json out{{"K", groups},
           {"spectral_radius", finite(report.spectral_radius)},
           {"regime", std::string(to_string(report.regime))}};
  if (report.kappa_bound) out["kappa_bound"] = finite(*report.kappa_bound);
  if (report.stationary) {
    out["stationary"] = number_array(*report.stationary);
    if (auto b = instantaneous_bias(*report.stationary, groups)) out["b_star_inst"] = *b;
  } else {
    out["stationary"] = nullptr;
    out["non_stationary"] = true;
  }
  if (report.condition) out["condition"] = finite(*report.condition);
  return out.dump(2) + "\n";
}

void write_margin_csv(std::ostream& out, const BoundCheck& check) {
  out << "t,interval,normalized,bound,margin\n";
  for (std::size_t k = 0; k < check.times.size(); ++k) {
    out << format_double(check.times[k]) << ',' << check.interval_of[k] << ','
        << format_double(check.normalized[k]) << ',' << format_double(check.bound[k]) << ','
        << format_double(check.margin[k]) << '\n';
  }
}

void write_bias_series_csv(std::ostream& out, const BiasSeries& series) {
  out << "t,b_emp,b_inst,source\n";
  const std::string source(to_string(series.source));
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    out << format_double(series.times[k]) << ',' << format_optional(series.b_emp[k]) << ','
        << format_optional(series.b_inst[k]) << ',' << source << '\n';
  }
}

void write_edges_csv(std::ostream& out, const TemporalGraph& graph) {
  out << "t,u,v,g_u,g_v\n";
  for (const TimedEdge& e : graph.edges()) {
    out << format_double(e.t) << ',' << e.u << ',' << e.v << ',' << graph.group(e.u) << ','
        << graph.group(e.v) << '\n';
  }
}

void write_audit_csv(std::ostream& out, const NetsimRun& run) {
  out << "t,u,candidates,scores,accepted,pool_same,pool_cross\n";
  for (const AuditRecord& r : run.audit) {
    out << format_double(r.t) << ',' << r.u << ',';
    for (std::size_t k = 0; k < r.candidates.size(); ++k) out << (k ? ";" : "") << r.candidates[k];
    out << ',';
    for (std::size_t k = 0; k < r.scores.size(); ++k) {
      out << (k ? ";" : "") << format_double(r.scores[k]);
    }
    out << ',';
    for (std::size_t k = 0; k < r.accepted.size(); ++k) out << (k ? ";" : "") << (r.accepted[k] ? 1 : 0);
    out << ',' << r.pool_same << ',' << r.pool_cross << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, [&](std::ostream& out) { out << text; });
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return buf.str();
}

}  // namespace homophily
