#include "manifest.hpp"

#include <algorithm>

#include "config.hpp"
#include "homophily/io.hpp"

namespace homophily::cli {

using nlohmann::json;

std::string tool_version() { return HOMOPHILY_VERSION; }

void write_manifest(const RunManifest& manifest) {
  std::vector<std::string> outputs;
  if (std::filesystem::exists(manifest.out_dir)) {
    for (const auto& entry : std::filesystem::recursive_directory_iterator(manifest.out_dir)) {
      if (!entry.is_regular_file()) continue;
      const auto rel = std::filesystem::relative(entry.path(), manifest.out_dir).generic_string();
      if (rel != kManifestName) outputs.push_back(rel);
    }
  }
  std::sort(outputs.begin(), outputs.end());
  const json doc{{"command", manifest.command},
                 {"argv", manifest.argv},
                 {"config", manifest.config},
                 {"seed", manifest.seed},
                 {"tool_version", tool_version()},
                 {"inputs", manifest.inputs},
                 {"out_dir", manifest.out_dir.generic_string()},
                 {"outputs", outputs},
                 {"wall_clock_seconds", manifest.wall_clock_seconds}};
  write_text_file(manifest.out_dir / kManifestName, doc.dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), 0, std::string("invalid manifest: ") + e.what());
  }
  RunManifest m;
  try {
    m.command = doc.at("command").get<std::string>();
    m.argv = doc.at("argv").get<std::vector<std::string>>();
    m.config = doc.value("config", json(nullptr));
    m.seed = doc.value("seed", std::uint64_t{0});
    m.inputs = doc.value("inputs", std::vector<std::string>{});
    m.out_dir = doc.at("out_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(path.string(), 0, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

}  // namespace homophily::cli
