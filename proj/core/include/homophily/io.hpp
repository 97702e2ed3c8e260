#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "homophily/bias.hpp"
#include "homophily/estimation.hpp"
#include "homophily/event_log.hpp"
#include "homophily/meanfield.hpp"
#include "homophily/netsim.hpp"
#include "homophily/temporal_graph.hpp"

namespace homophily {

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input content. `line` is 1-based, 0 when not line-specific.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& source, std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Shortest text with 17 significant digits; throws std::domain_error on NaN/Inf.
std::string format_double(double value);
/// Empty string for nullopt.
std::string format_optional(const std::optional<double>& value);

// Event logs. Marks are written as 1-based canonical (i, j).
void write_event_log_jsonl(std::ostream& out, const EventLog& log);
EventLog read_event_log_jsonl(std::istream& in, const std::string& source = "<stream>");
void write_event_log_jsonl(const std::filesystem::path& path, const EventLog& log);
EventLog read_event_log_jsonl(const std::filesystem::path& path);

/// CSV (t,i,j) plus a sidecar JSON {"K", "horizon"} at `path` + ".meta.json".
void write_event_log_csv(const std::filesystem::path& path, const EventLog& log);
EventLog read_event_log_csv(const std::filesystem::path& path);

/// Dispatches on extension: .csv reads CSV + sidecar, anything else JSONL.
EventLog read_event_log(const std::filesystem::path& path);

// Fits. One fit is a JSON object {window, mu_hat, alpha_hat, beta, loglik, flags};
// several are written as an array of such objects.
std::string fit_to_json(const DiagonalFit& fit);
std::string fits_to_json(std::span<const DiagonalFit> fits);
std::vector<DiagonalFit> fits_from_json(const std::string& text, const std::string& source);

/// Wide regime table: one row per pair with the true alpha per window (when
/// given, as a G x m matrix), the estimate per window and mu_hat per window.
void write_regime_table_csv(std::ostream& out, std::span<const DiagonalFit> fits,
                            const std::optional<Eigen::MatrixXd>& true_alpha = std::nullopt);

// Mean-field exports.
void write_trajectory_csv(std::ostream& out, const MeanFieldTrajectory& trajectory, int groups);
std::string stability_report_to_json(const StabilityReport& report, int groups);
void write_margin_csv(std::ostream& out, const BoundCheck& check);

void write_bias_series_csv(std::ostream& out, const BiasSeries& series);

// netsim exports.
void write_edges_csv(std::ostream& out, const TemporalGraph& graph);
/// candidates, scores and accepted flags are ';'-joined inside their fields.
void write_audit_csv(std::ostream& out, const NetsimRun& run);

/// Opens `path` for writing (creating parent directories) and hands the stream
/// to `body`. Throws IoError.
template <typename Body>
void write_file(const std::filesystem::path& path, Body&& body);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace homophily

#include <fstream>

namespace homophily {

template <typename Body>
void write_file(const std::filesystem::path& path, Body&& body) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  body(out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace homophily
