#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace homophily::cli {

inline constexpr const char* kManifestName = "manifest.json";

/// Record of one command invocation, written as <out>/manifest.json.
/// `argv` excludes the program name and the --out option so a replay can
/// direct its outputs elsewhere.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json config = nullptr;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::filesystem::path out_dir;
  double wall_clock_seconds = 0.0;
};

/// Writes the manifest, listing every regular file under out_dir (sorted,
/// relative, manifest excluded) as outputs.
void write_manifest(const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

std::string tool_version();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace homophily::cli
