#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace crlab::tools {

/// Parsed command line shared by the relay and ia subcommands.
struct RunOptions {
  std::string command;      ///< "relay" or "ia"
  std::string config_path;  ///< empty: built-in defaults
  int seeds = 10;
  std::filesystem::path out_dir = ".";

  std::string sweep;  ///< empty: single point
  // Unset bounds fall back to the parameter's default grid.
  double from = 0.0, to = 0.0, step = 0.0;
  bool has_from = false, has_to = false, has_step = false;

  std::string scenario;  ///< ia only; empty: taken from the config, else single-channel
  bool ratio_table = false;
  int ratio_channels = 6;
  std::string eta_grid = "0.05:0.95:0.05";
};

/// Version string baked in at configure time.
std::string version();

/// Each returns the files written, manifest last. Errors propagate as
/// ConfigError, DomainError or NumericError.
std::vector<std::filesystem::path> run_relay(const RunOptions& options);
std::vector<std::filesystem::path> run_ia(const RunOptions& options);

/// Writes manifest.json into the output directory.
std::filesystem::path write_manifest(const RunOptions& options);

/// Full command line entry point with the exit-code mapping
/// (0 ok, 1 usage, 2 config error, 3 numeric failure).
int run_cli(int argc, char** argv);

}  // namespace crlab::tools
