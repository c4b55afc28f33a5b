#include "crlab/tools/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "crlab/error.hpp"
#include "crlab/units.hpp"

namespace crlab::tools {
namespace {

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

YAML::Node parse_document(std::string_view text) {
  try {
    YAML::Node root = YAML::Load(std::string(text));
    if (root.IsNull()) return YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap()) throw ConfigError("top level must be a mapping", line_of(root));
    return root;
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, e.mark.line + 1);
  }
}

// Rejects keys outside `allowed` so typos do not pass silently.
void check_keys(const YAML::Node& map, const std::string& where, const std::set<std::string>& allowed) {
  if (!map.IsMap()) throw ConfigError(where + " must be a mapping", line_of(map));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where, line_of(kv.first));
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& name) {
  if (!node.IsScalar()) throw ConfigError(name + " must be a scalar", line_of(node));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(name + " has the wrong type", line_of(node));
  }
}

template <class T>
void read(const YAML::Node& section, const char* key, T& out) {
  if (const auto node = section[key]) out = scalar<T>(node, key);
}

// Runs a setter that may throw DomainError and pins the error to the node's line.
template <class F>
void at_line(const YAML::Node& node, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what(), line_of(node));
  }
}

channel::MarkovChannelModel read_markov(const YAML::Node& sec, const channel::MarkovChannelModel& base) {
  check_keys(sec, "channel", {"lambda", "mu", "eta"});
  channel::MarkovChannelModel m = base;
  double lambda = base.lambda;
  read(sec, "lambda", lambda);
  if (sec["mu"] && sec["eta"]) throw ConfigError("give either mu or eta, not both", line_of(sec["eta"]));
  at_line(sec, [&] {
    if (sec["mu"]) {
      m = channel::MarkovChannelModel::from_transitions(lambda, scalar<double>(sec["mu"], "mu"));
    } else if (sec["eta"]) {
      m = channel::MarkovChannelModel::from_utilization(scalar<double>(sec["eta"], "eta"), lambda);
    } else if (sec["lambda"]) {
      m = channel::MarkovChannelModel::from_utilization(base.eta, lambda);
    }
  });
  return m;
}

solver::Options read_solver(const YAML::Node& sec, solver::Options o, const std::string& where) {
  check_keys(sec, where,
             {"step", "kappa_conv", "gap_tol", "certificate_tol", "max_iterations", "inner_max_iterations",
              "inner_tol", "mu0"});
  read(sec, "step", o.step);
  read(sec, "kappa_conv", o.kappa_conv);
  read(sec, "gap_tol", o.gap_tol);
  read(sec, "certificate_tol", o.certificate_tol);
  read(sec, "max_iterations", o.max_iterations);
  read(sec, "inner_max_iterations", o.inner_max_iterations);
  read(sec, "inner_tol", o.inner_tol);
  read(sec, "mu0", o.mu0);
  if (!(o.step > 0.0) || o.max_iterations < 1 || o.inner_max_iterations < 1 || !(o.mu0 >= 0.0)) {
    throw ConfigError(where + ": step, iteration caps and mu0 must be positive", line_of(sec));
  }
  return o;
}

video::VideoModel read_video(const YAML::Node& node) {
  if (node.IsScalar()) {
    video::VideoModel v;
    at_line(node, [&] { v = video::video_by_name(node.as<std::string>()); });
    return v;
  }
  check_keys(node, "users entry", {"name", "alpha", "beta"});
  video::VideoModel v;
  if (node["name"]) {
    const auto name = scalar<std::string>(node["name"], "name");
    try {
      v = video::video_by_name(name);
    } catch (const DomainError&) {
      v.name = name;
    }
  }
  read(node, "alpha", v.alpha);
  read(node, "beta", v.beta);
  at_line(node, [&] { v.validate(); });
  return v;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sim::ScenarioConfig parse_relay_config(std::string_view text, const sim::ScenarioConfig& base) {
  const YAML::Node root = parse_document(text);
  check_keys(root, "relay config", {"channel", "sensing", "access", "relay", "simulator"});
  sim::ScenarioConfig c = base;

  if (const auto sec = root["simulator"]) {
    check_keys(sec, "simulator", {"channels", "packet_bits", "slot_seconds", "horizon"});
    read(sec, "channels", c.channels);
    read(sec, "packet_bits", c.packet_bits);
    read(sec, "slot_seconds", c.slot_seconds);
    read(sec, "horizon", c.horizon);
  }
  if (const auto sec = root["channel"]) c.markov = read_markov(sec, c.markov);

  sensing::SensorProfile profile = c.sensors.empty() || c.sensors.front().empty() ? sensing::SensorProfile{}
                                                                                    : c.sensors.front().front();
  int per_channel = c.sensors.empty() ? 3 : static_cast<int>(c.sensors.front().size());
  if (const auto sec = root["sensing"]) {
    check_keys(sec, "sensing", {"sensors_per_channel", "false_alarm", "miss_detection"});
    read(sec, "sensors_per_channel", per_channel);
    read(sec, "false_alarm", profile.false_alarm);
    read(sec, "miss_detection", profile.miss_detection);
    if (per_channel < 1) throw ConfigError("sensors_per_channel must be >= 1", line_of(sec));
    at_line(sec, [&] { profile.validate(); });
  }
  if (c.channels < 1) throw ConfigError("channels must be >= 1", line_of(root["simulator"]));
  c.sensors.assign(static_cast<std::size_t>(c.channels),
                   std::vector<sensing::SensorProfile>(static_cast<std::size_t>(per_channel), profile));

  if (const auto sec = root["access"]) {
    check_keys(sec, "access", {"gamma", "n_links"});
    read(sec, "gamma", c.gamma);
    read(sec, "n_links", c.n_links);
  }

  relay::RelayLink link = c.links.empty() ? relay::RelayLink{} : c.links.front();
  if (const auto sec = root["relay"]) {
    check_keys(sec, "relay",
               {"source_power_dbm", "relay_power_dbm", "noise", "kappa", "mean_g0", "mean_g1", "mean_g2",
                "equalized_rate"});
    if (const auto n = sec["source_power_dbm"]) link.p_s = dbm_to_watts(scalar<double>(n, "source_power_dbm"));
    if (const auto n = sec["relay_power_dbm"]) link.p_r = dbm_to_watts(scalar<double>(n, "relay_power_dbm"));
    if (const auto n = sec["noise"]) link.noise_relay = link.noise_dest = scalar<double>(n, "noise");
    read(sec, "kappa", link.kappa);
    read(sec, "mean_g0", link.mean_g0);
    read(sec, "mean_g1", link.mean_g1);
    read(sec, "mean_g2", link.mean_g2);
    at_line(sec, [&] { link.validate(); });
    if (const auto n = sec["equalized_rate"]) {
      if (n.IsNull()) {
        c.equalized_relay_rate.reset();
      } else {
        const double r = scalar<double>(n, "equalized_rate");
        if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("equalized_rate must lie in [0,1]", line_of(n));
        c.equalized_relay_rate = r;
      }
    }
  }
  if (c.n_links < 1) throw ConfigError("n_links must be >= 1", line_of(root["access"]));
  c.links.assign(static_cast<std::size_t>(c.n_links), link);

  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid relay scenario: ") + e.what(), line_of(root));
  }
  return c;
}

sim::ScenarioConfig load_relay_config(const std::string& path, const sim::ScenarioConfig& base) {
  return parse_relay_config(read_file(path), base);
}

std::string scenario_name(std::string_view text) {
  const YAML::Node root = parse_document(text);
  if (const auto n = root["scenario"]) return scalar<std::string>(n, "scenario");
  return {};
}

video::SessionConfig parse_ia_config(std::string_view text, const video::SessionConfig& base) {
  const YAML::Node root = parse_document(text);
  check_keys(root, "ia config", {"scenario", "channel", "sensing", "video", "solver", "evaluator"});
  video::SessionConfig c = base;
  if (const auto n = root["scenario"]) {
    at_line(n, [&] { c.mode = video::parse_mode(scalar<std::string>(n, "scenario")); });
  }
  if (const auto sec = root["channel"]) c.markov = read_markov(sec, c.markov);
  if (const auto sec = root["sensing"]) {
    check_keys(sec, "sensing",
               {"sensors_per_channel", "false_alarm", "miss_detection", "gamma", "availability_cutoff"});
    read(sec, "sensors_per_channel", c.sensors_per_channel);
    read(sec, "false_alarm", c.sensor.false_alarm);
    read(sec, "miss_detection", c.sensor.miss_detection);
    read(sec, "gamma", c.gamma);
    read(sec, "availability_cutoff", c.availability_cutoff);
  }
  if (const auto sec = root["video"]) {
    check_keys(sec, "video",
               {"channels", "transmitters", "users", "bandwidth_mhz", "horizon", "p_max", "noise", "mean_gain"});
    read(sec, "channels", c.channels);
    read(sec, "transmitters", c.transmitters);
    read(sec, "bandwidth_mhz", c.bandwidth_mhz);
    read(sec, "horizon", c.horizon);
    read(sec, "p_max", c.p_max);
    read(sec, "noise", c.noise);
    read(sec, "mean_gain", c.mean_gain);
    if (const auto users = sec["users"]) {
      if (!users.IsSequence()) throw ConfigError("users must be a list", line_of(users));
      c.videos.clear();
      for (const auto& u : users) c.videos.push_back(read_video(u));
    }
  }
  if (const auto sec = root["solver"]) c.solver = read_solver(sec, c.solver, "solver");
  if (const auto sec = root["evaluator"]) c.evaluator = read_solver(sec, c.evaluator, "evaluator");

  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid IA scenario: ") + e.what(), line_of(root));
  }
  return c;
}

video::SessionConfig load_ia_config(const std::string& path, const video::SessionConfig& base) {
  return parse_ia_config(read_file(path), base);
}

std::vector<std::uint64_t> seed_list(int n) {
  if (n < 1) throw ConfigError("--seeds must be >= 1");
  std::vector<std::uint64_t> seeds;
  for (int i = 1; i <= n; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
  return seeds;
}

std::vector<double> make_grid(double from, double to, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("grid step must be positive");
  if (!(to >= from)) throw DomainError("grid end lies before its start");
  const auto count = static_cast<long long>(std::floor((to - from) / step + 1e-9));
  std::vector<double> grid;
  for (long long i = 0; i <= count; ++i) {
    // Snap to 12 decimals so 0.1 steps print as typed.
    const double v = from + static_cast<double>(i) * step;
    grid.push_back(std::round(v * 1e12) / 1e12);
  }
  return grid;
}

std::vector<double> parse_grid(std::string_view spec) {
  double parts[3];
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const auto colon = i < 2 ? spec.find(':', pos) : spec.size();
    if (colon == std::string_view::npos) throw DomainError("grid must look like from:to:step");
    const auto token = spec.substr(pos, colon - pos);
    try {
      std::size_t used = 0;
      parts[i] = std::stod(std::string(token), &used);
      if (used != token.size()) throw DomainError("bad number in grid");
    } catch (const std::logic_error&) {
      throw DomainError("bad number '" + std::string(token) + "' in grid");
    }
    pos = colon + 1;
  }
  if (pos <= spec.size() && spec.find(':', pos) != std::string_view::npos) {
    throw DomainError("grid must look like from:to:step");
  }
  return make_grid(parts[0], parts[1], parts[2]);
}

}  // namespace crlab::tools
