#include <fstream>
#include <nlohmann/json.hpp>

#include "crlab/error.hpp"
#include "crlab/tools/commands.hpp"
#include "crlab/tools/config.hpp"

#ifndef CRLAB_VERSION
#define CRLAB_VERSION "unknown"
#endif

namespace crlab::tools {

std::string version() { return CRLAB_VERSION; }

std::filesystem::path write_manifest(const RunOptions& options) {
  nlohmann::ordered_json j;
  j["command"] = options.command;
  j["config"] = options.config_path;
  j["seeds"] = seed_list(options.seeds);
  j["out_dir"] = options.out_dir.string();
  j["version"] = version();
  const auto path = options.out_dir / "manifest.json";
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << j.dump(2) << '\n';
  return path;
}

}  // namespace crlab::tools
