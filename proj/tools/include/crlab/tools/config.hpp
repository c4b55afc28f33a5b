#pragma once

// YAML scenario files for the relay and IA studies. Every error names the
// offending line.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crlab/simulator.hpp"
#include "crlab/video.hpp"

namespace crlab::tools {

/// Applies a relay-study document on top of `base`. Sections: channel,
/// sensing, access, relay, simulator. Throws ConfigError.
sim::ScenarioConfig parse_relay_config(std::string_view text, const sim::ScenarioConfig& base);
sim::ScenarioConfig load_relay_config(const std::string& path, const sim::ScenarioConfig& base);

/// Applies an IA-study document on top of `base`. Sections: scenario,
/// channel, sensing, video, solver. Throws ConfigError.
video::SessionConfig parse_ia_config(std::string_view text, const video::SessionConfig& base);
video::SessionConfig load_ia_config(const std::string& path, const video::SessionConfig& base);

/// Reads only the `scenario` key of an IA document, or returns an empty string.
std::string scenario_name(std::string_view text);

/// Seeds 1..n.
std::vector<std::uint64_t> seed_list(int n);

/// from, from + step, ... up to `to` inclusive (within step * 1e-9).
/// Throws DomainError on a non-positive step or to < from.
std::vector<double> make_grid(double from, double to, double step);

/// "a:b:c" -> make_grid(a, b, c). Throws DomainError on bad syntax.
std::vector<double> parse_grid(std::string_view spec);

std::string read_file(const std::string& path);

}  // namespace crlab::tools
