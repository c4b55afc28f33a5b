#pragma once

// Slotted Monte Carlo engine for the cooperative relay network: Markov
// channel evolution, cooperative sensing, CSMA contention and DF/AF/DL frame
// delivery, with the matching analytical capacities for comparison.

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "crlab/access.hpp"
#include "crlab/channel.hpp"
#include "crlab/relay.hpp"
#include "crlab/sensing.hpp"

namespace crlab::sim {

using access::Strategy;

struct ScenarioConfig {
  int channels = 5;
  int n_links = 7;
  channel::MarkovChannelModel markov = channel::MarkovChannelModel::from_transitions(0.7, 0.2);
  /// One sensor list per channel.
  std::vector<std::vector<sensing::SensorProfile>> sensors;
  double gamma = 0.08;
  /// One link per CR relay link.
  std::vector<relay::RelayLink> links;
  /// When set, DF and AF use this decode rate on every link instead of the
  /// link model; DL always uses the link model.
  std::optional<double> equalized_relay_rate;
  double packet_bits = 1000.0;
  double slot_seconds = 1e-3;
  std::int64_t horizon = 200000;  ///< slots per seed; must be even
  std::vector<std::uint64_t> seeds;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
};

/// Throughput statistics of one strategy over all seeds.
struct RunStats {
  Strategy strategy = Strategy::DF;
  double mean_bps = 0.0;
  double std_error_bps = 0.0;
  double ci95_bps = 0.0;  ///< Student-t half width over seeds
  std::vector<double> samples_bps;
  /// Per channel: fraction of busy slots in which a CR node accessed the
  /// channel, pooled over seeds.
  std::vector<double> collision_rate;
};

/// Decode rate of every link for the strategy, honoring the equalized rate.
std::vector<double> decode_rates(const ScenarioConfig& config, Strategy strategy);

/// Exact analytical capacity in bit/s.
double analytical_capacity(const ScenarioConfig& config, Strategy strategy);

RunStats run_scenario(const ScenarioConfig& config, Strategy strategy);

/// All three strategies over the same channel, sensing and contention draws.
/// Each entry equals what run_scenario returns for that strategy alone.
std::array<RunStats, 3> run_all_strategies(const ScenarioConfig& config);

enum class SweepParameter { Channels, Eta, RelayPower };

std::string_view to_string(SweepParameter p);
/// Accepts "channels", "eta" and "relay_power" (also "relay-power").
SweepParameter parse_sweep_parameter(std::string_view name);

/// Copy of `config` with one parameter replaced. Channels replicates the
/// first channel's sensors; Eta keeps lambda and solves for mu; RelayPower is
/// the relay transmit power in dBm applied to every link, and drops the
/// equalized relay rate.
ScenarioConfig with_parameter(const ScenarioConfig& config, SweepParameter p, double value);

struct SweepRow {
  double param_value = 0.0;
  RunStats stats;
  double analytical_bps = 0.0;
};

/// One row per grid point per strategy, grid-major. Throws DomainError on an
/// empty grid.
std::vector<SweepRow> sweep(const ScenarioConfig& config, SweepParameter p, std::span<const double> grid);

/// Long-format CSV: param_value,strategy,throughput_mean_bps,ci95_bps,analytical_bps
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

/// Table II defaults with the given sensing setup for every channel.
ScenarioConfig table2_scenario(int sensors_per_channel = 3, double false_alarm = 0.1, double miss_detection = 0.2);

}  // namespace crlab::sim
