#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homophily/hawkes_params.hpp"
#include "homophily/intensity.hpp"
#include "homophily/netsim.hpp"
#include "homophily/regime_schedule.hpp"

namespace homophily::cli {

/// Malformed or invalid configuration. The message carries source:line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A flat JSON object with key tracking, so unknown keys are reported with the
/// line they appear on.
class ConfigDocument {
 public:
  ConfigDocument(std::string text, std::string source);

  bool has(const std::string& key) const { return root_.contains(key); }
  const nlohmann::json& at(const std::string& key);
  /// Line of the first `"key":` occurrence, 0 if not found.
  std::size_t line_of(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  template <typename T>
  T get(const std::string& key);
  template <typename T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  /// Throws for any key not read through at()/get().
  void reject_unknown() const;
  const nlohmann::json& root() const noexcept { return root_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::string text_;
  std::string source_;
  nlohmann::json root_;
  std::set<std::string> used_;
};

template <typename T>
T ConfigDocument::get(const std::string& key) {
  const auto& value = at(key);
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(key, "has the wrong type");
  }
}

/// Keys accepted by the Hawkes parameter config (simulate, analyze).
const std::vector<std::string>& hawkes_config_keys();
/// Keys accepted by the netsim config.
const std::vector<std::string>& netsim_config_keys();

struct HawkesConfig {
  explicit HawkesConfig(HawkesParams p) : params(std::move(p)) {}

  HawkesParams params;
  std::optional<RegimeSchedule> schedule;
  RegimeMode mode = RegimeMode::kReweightPast;
  std::optional<double> horizon;
  std::uint64_t seed = 1;
  std::optional<double> step;
  std::string description;
  nlohmann::json snapshot;  // the parsed document, for manifests
};

HawkesConfig parse_hawkes_config(const std::string& text, const std::string& source);

struct NetsimConfig {
  SimConfig sim;
  std::string policy = "homophily-boost";
  PolicyOptions policy_options;
  double beta = 1.0;
  bool tie_mu = false;
  std::string description;
  nlohmann::json snapshot;
};

NetsimConfig parse_netsim_config(const std::string& text, const std::string& source);

RegimeMode parse_regime_mode(const std::string& name);
std::string to_string(RegimeMode mode);

}  // namespace homophily::cli
