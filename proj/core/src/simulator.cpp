#include "crlab/simulator.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <random>
#include <string>

#include "crlab/error.hpp"
#include "crlab/parallel.hpp"
#include "crlab/units.hpp"

namespace crlab::sim {
namespace {

using access::SensingConfig;

std::size_t strategy_index(Strategy s) { return static_cast<std::size_t>(s); }

// Access decision per sensing outcome (bit i = reading of sensor i).
struct ChannelPlan {
  std::vector<std::uint8_t> access_odd;
  std::vector<std::uint8_t> access_even;
};

struct Prepared {
  std::vector<ChannelPlan> plans;
  std::array<std::vector<double>, 3> rates;
};

Prepared prepare(const ScenarioConfig& config) {
  Prepared p;
  const double p1 = access::csma_probs(config.n_links).p1;
  const double gamma_odd = access::adjusted_tolerance(config.gamma, p1);
  for (const auto& sensors : config.sensors) {
    const auto table = sensing::enumerate_thresholds(config.markov.eta, sensors);
    ChannelPlan plan;
    auto admit = [&](std::vector<std::uint8_t>& lookup, double gamma) {
      lookup.assign(std::size_t{1} << sensors.size(), 0);
      const std::size_t cut = sensing::optimal_threshold(table, gamma).optimal_index;
      for (std::size_t i = 0; i < cut; ++i) {
        std::uint32_t bits = 0;
        const auto& r = table.entries[i].outcome.readings;
        for (std::size_t b = 0; b < r.size(); ++b) bits |= static_cast<std::uint32_t>(r[b] != 0) << b;
        lookup[bits] = 1;
      }
    };
    admit(plan.access_odd, gamma_odd);
    admit(plan.access_even, config.gamma);
    p.plans.push_back(std::move(plan));
  }
  for (Strategy s : access::kAllStrategies) p.rates[strategy_index(s)] = decode_rates(config, s);
  return p;
}

struct SeedResult {
  std::array<double, 3> throughput_bps{};
  std::vector<std::int64_t> busy_slots;
  std::vector<std::int64_t> collisions;
};

// The environment stream (channels, sensing, contention) is shared by all
// strategies; each strategy owns its decode stream.
SeedResult simulate_seed(const ScenarioConfig& config, const Prepared& prep, std::uint64_t seed,
                         std::span<const Strategy> strategies) {
  std::seed_seq env_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  std::mt19937_64 env(env_seq);
  std::array<std::mt19937_64, 3> decode;
  for (std::size_t s = 0; s < 3; ++s) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(0xdec0de + s)};
    decode[s].seed(seq);
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const std::size_t m = config.sensors.size();
  SeedResult out;
  out.busy_slots.assign(m, 0);
  out.collisions.assign(m, 0);
  std::array<std::int64_t, 3> frames{};

  std::vector<channel::ChannelState> state(m);
  for (auto& st : state) st = channel::stationary_state(config.markov, env);

  const double rts_prob = 1.0 / config.n_links;
  std::vector<std::uint8_t> usable_odd(m), access_odd(m);

  auto sense = [&](std::size_t c, bool occupied) {
    std::uint32_t bits = 0;
    const auto& sensors = config.sensors[c];
    for (std::size_t i = 0; i < sensors.size(); ++i) {
      if (sensing::draw_reading(sensors[i], occupied, env) != 0) bits |= 1u << i;
    }
    return bits;
  };

  const std::int64_t pairs = config.horizon / 2;
  for (std::int64_t pair = 0; pair < pairs; ++pair) {
    // Odd slot: channels evolve (the first slot uses the stationary draw).
    int odd_count = 0;
    for (std::size_t c = 0; c < m; ++c) {
      if (pair > 0) state[c] = channel::step_channel(state[c], config.markov, env);
      access_odd[c] = prep.plans[c].access_odd[sense(c, state[c].occupied)];
      usable_odd[c] = access_odd[c] && !state[c].occupied;
      odd_count += usable_odd[c];
    }

    int senders = 0;
    int winner = -1;
    for (int k = 0; k < config.n_links; ++k) {
      if (uniform(env) < rts_prob) {
        ++senders;
        winner = k;
      }
    }
    const bool won = senders == 1;
    for (std::size_t c = 0; c < m; ++c) {
      if (state[c].occupied) {
        ++out.busy_slots[c];
        if (won && access_odd[c]) ++out.collisions[c];
      }
    }

    // Even slot: the winner keeps the channels; no new contention.
    int even_count = 0;
    for (std::size_t c = 0; c < m; ++c) {
      state[c] = channel::step_channel(state[c], config.markov, env);
      const bool accessed = prep.plans[c].access_even[sense(c, state[c].occupied)];
      even_count += accessed && !state[c].occupied;
      if (state[c].occupied) {
        ++out.busy_slots[c];
        if (won && accessed) ++out.collisions[c];
      }
    }

    if (!won) continue;
    for (Strategy s : strategies) {
      const std::size_t si = strategy_index(s);
      const int n = access::frames_delivered(s, odd_count, even_count);
      if (n == 0) continue;
      std::binomial_distribution<int> ok(n, prep.rates[si][static_cast<std::size_t>(winner)]);
      frames[si] += ok(decode[si]);
    }
  }

  const double elapsed = static_cast<double>(pairs * 2) * config.slot_seconds;
  for (std::size_t s = 0; s < 3; ++s) {
    out.throughput_bps[s] = static_cast<double>(frames[s]) * config.packet_bits / elapsed;
  }
  return out;
}

RunStats summarize(Strategy s, std::vector<double> samples, const std::vector<SeedResult>& seeds, std::size_t m) {
  RunStats st;
  st.strategy = s;
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  st.mean_bps = sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - st.mean_bps) * (v - st.mean_bps);
    const double sd = std::sqrt(ss / (n - 1.0));
    st.std_error_bps = sd / std::sqrt(n);
    const boost::math::students_t t(n - 1.0);
    st.ci95_bps = boost::math::quantile(boost::math::complement(t, 0.025)) * st.std_error_bps;
  }
  st.samples_bps = std::move(samples);
  st.collision_rate.assign(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    std::int64_t busy = 0, hits = 0;
    for (const auto& r : seeds) {
      busy += r.busy_slots[c];
      hits += r.collisions[c];
    }
    st.collision_rate[c] = busy > 0 ? static_cast<double>(hits) / static_cast<double>(busy) : 0.0;
  }
  return st;
}

std::vector<RunStats> run(const ScenarioConfig& config, std::span<const Strategy> strategies) {
  config.validate();
  const Prepared prep = prepare(config);
  std::vector<SeedResult> results(config.seeds.size());
  parallel_for(config.seeds.size(),
               [&](std::size_t i) { results[i] = simulate_seed(config, prep, config.seeds[i], strategies); });
  std::vector<RunStats> out;
  for (Strategy s : strategies) {
    std::vector<double> samples;
    for (const auto& r : results) samples.push_back(r.throughput_bps[strategy_index(s)]);
    out.push_back(summarize(s, std::move(samples), results, config.sensors.size()));
  }
  return out;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (channels < 1) throw ConfigError("channels must be >= 1");
  if (n_links < 1) throw ConfigError("n_links must be >= 1");
  try {
    markov.validate();
    if (std::abs(1.0 - channel::stationary_idle_prob(markov) - markov.eta) > 1e-9) {
      throw ConfigError("eta is inconsistent with lambda and mu");
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("markov: ") + e.what());
  }
  if (sensors.size() != static_cast<std::size_t>(channels)) {
    throw ConfigError("need one sensor list per channel (" + std::to_string(channels) + "), got " +
                      std::to_string(sensors.size()));
  }
  for (const auto& list : sensors) {
    if (list.empty()) throw ConfigError("every channel needs at least one sensor");
    if (list.size() > sensing::kMaxEnumeratedSensors) throw ConfigError("too many sensors on one channel");
    try {
      for (const auto& s : list) s.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("sensors: ") + e.what());
    }
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0,1)");
  if (links.size() != static_cast<std::size_t>(n_links)) {
    throw ConfigError("need one relay link per CR link (" + std::to_string(n_links) + "), got " +
                      std::to_string(links.size()));
  }
  try {
    for (const auto& l : links) l.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("links: ") + e.what());
  }
  if (equalized_relay_rate && !(*equalized_relay_rate >= 0.0 && *equalized_relay_rate <= 1.0)) {
    throw ConfigError("equalized_relay_rate must lie in [0,1]");
  }
  if (!(packet_bits > 0.0)) throw ConfigError("packet_bits must be positive");
  if (!(slot_seconds > 0.0)) throw ConfigError("slot_seconds must be positive");
  if (horizon < 2 || horizon % 2 != 0) throw ConfigError("horizon must be a positive even number of slots");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
}

std::vector<double> decode_rates(const ScenarioConfig& config, Strategy strategy) {
  std::vector<double> rates;
  rates.reserve(config.links.size());
  for (const auto& link : config.links) {
    if (strategy != Strategy::DL && config.equalized_relay_rate) {
      rates.push_back(*config.equalized_relay_rate);
      continue;
    }
    switch (strategy) {
      case Strategy::DF: rates.push_back(relay::decoding_rate_df(link)); break;
      case Strategy::AF: rates.push_back(relay::decoding_rate_af(link)); break;
      case Strategy::DL: rates.push_back(relay::decoding_rate_dl(link)); break;
    }
  }
  return rates;
}

double analytical_capacity(const ScenarioConfig& config, Strategy strategy) {
  const double p1 = access::csma_probs(config.n_links).p1;
  const SensingConfig sc{config.sensors, config.gamma, p1};
  const auto dist = access::slot_pair_distribution(config.markov, sc);
  const auto rates = decode_rates(config, strategy);
  return access::capacity(access::expected_frames(dist, strategy), rates, p1, config.packet_bits,
                          config.slot_seconds, config.n_links);
}

RunStats run_scenario(const ScenarioConfig& config, Strategy strategy) {
  const Strategy one[] = {strategy};
  return run(config, one).front();
}

std::array<RunStats, 3> run_all_strategies(const ScenarioConfig& config) {
  auto v = run(config, access::kAllStrategies);
  return {std::move(v[0]), std::move(v[1]), std::move(v[2])};
}

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Channels: return "channels";
    case SweepParameter::Eta: return "eta";
    case SweepParameter::RelayPower: return "relay_power";
  }
  return "?";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "channels" || s == "m") return SweepParameter::Channels;
  if (s == "eta") return SweepParameter::Eta;
  if (s == "relay_power" || s == "relay-power") return SweepParameter::RelayPower;
  throw DomainError("unknown sweep parameter '" + std::string(name) + "'");
}

ScenarioConfig with_parameter(const ScenarioConfig& config, SweepParameter p, double value) {
  ScenarioConfig c = config;
  switch (p) {
    case SweepParameter::Channels: {
      const double rounded = std::round(value);
      if (rounded < 1.0 || std::abs(rounded - value) > 1e-9) {
        throw DomainError("channel count must be a positive integer");
      }
      if (config.sensors.empty()) throw DomainError("channel sweep needs a sensor template");
      c.channels = static_cast<int>(rounded);
      c.sensors.assign(static_cast<std::size_t>(c.channels), config.sensors.front());
      break;
    }
    case SweepParameter::Eta:
      c.markov = channel::MarkovChannelModel::from_utilization(value, config.markov.lambda);
      break;
    case SweepParameter::RelayPower:
      // The relay power only matters through the link-level decode rates.
      for (auto& l : c.links) l.p_r = dbm_to_watts(value);
      c.equalized_relay_rate.reset();
      break;
  }
  return c;
}

std::vector<SweepRow> sweep(const ScenarioConfig& config, SweepParameter p, std::span<const double> grid) {
  if (grid.empty()) throw DomainError("sweep grid is empty");
  std::vector<SweepRow> rows;
  for (double v : grid) {
    const ScenarioConfig point = with_parameter(config, p, v);
    auto stats = run_all_strategies(point);
    for (auto& st : stats) {
      SweepRow row;
      row.param_value = v;
      row.analytical_bps = analytical_capacity(point, st.strategy);
      row.stats = std::move(st);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "param_value,strategy,throughput_mean_bps,ci95_bps,analytical_bps\n";
  const auto flags = os.flags();
  const auto precision = os.precision();
  for (const auto& r : rows) {
    os << std::defaultfloat << std::setprecision(10) << r.param_value << ',' << access::to_string(r.stats.strategy)
       << ',' << std::fixed << std::setprecision(3) << r.stats.mean_bps << ',' << r.stats.ci95_bps << ','
       << r.analytical_bps << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

ScenarioConfig table2_scenario(int sensors_per_channel, double false_alarm, double miss_detection) {
  ScenarioConfig c;
  c.channels = 5;
  c.n_links = 7;
  c.markov = channel::MarkovChannelModel::from_transitions(0.7, 0.2);
  c.sensors.assign(5, std::vector<sensing::SensorProfile>(static_cast<std::size_t>(sensors_per_channel),
                                                           sensing::SensorProfile{false_alarm, miss_detection}));
  c.gamma = 0.08;
  relay::RelayLink link;
  link.p_s = dbm_to_watts(10.0);
  link.p_r = dbm_to_watts(10.0);
  link.noise_relay = 1e-3;
  link.noise_dest = 1e-3;
  link.mean_g0 = 0.2;
  link.mean_g1 = 1.0;
  link.mean_g2 = 1.0;
  link.kappa = 3.0;
  c.links.assign(7, link);
  c.equalized_relay_rate = 0.9;
  c.packet_bits = 1000.0;
  c.slot_seconds = 1e-3;
  c.horizon = 200000;
  c.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return c;
}

}  // namespace crlab::sim
