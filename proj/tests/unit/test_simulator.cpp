#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "crlab/error.hpp"
#include "crlab/simulator.hpp"
#include "crlab/units.hpp"

using namespace crlab;
using sim::Strategy;

namespace {

sim::ScenarioConfig small_table2(int seeds = 4, std::int64_t horizon = 20000) {
  auto c = sim::table2_scenario();
  c.horizon = horizon;
  c.seeds.clear();
  for (int i = 1; i <= seeds; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
  return c;
}

}  // namespace

TEST(Simulator, Table2Defaults) {
  const auto c = sim::table2_scenario();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.channels, 5);
  EXPECT_EQ(c.n_links, 7);
  EXPECT_NEAR(c.markov.eta, 0.6, 1e-12);
  EXPECT_DOUBLE_EQ(c.gamma, 0.08);
  EXPECT_NEAR(c.links.front().p_s, dbm_to_watts(10.0), 1e-15);
  EXPECT_EQ(c.seeds.size(), 10u);
  EXPECT_EQ(c.horizon % 2, 0);
}

TEST(Simulator, ValidationErrors) {
  auto c = small_table2();
  c.horizon = 1001;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_table2();
  c.seeds.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_table2();
  c.sensors.pop_back();
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_table2();
  c.gamma = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_table2();
  c.markov.eta = 0.3;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Simulator, DecodeRatesHonorEqualizedRate) {
  auto c = small_table2();
  for (double r : sim::decode_rates(c, Strategy::DF)) EXPECT_DOUBLE_EQ(r, 0.9);
  for (double r : sim::decode_rates(c, Strategy::AF)) EXPECT_DOUBLE_EQ(r, 0.9);
  for (double r : sim::decode_rates(c, Strategy::DL)) EXPECT_DOUBLE_EQ(r, relay::decoding_rate_dl(c.links[0]));
  c.equalized_relay_rate.reset();
  for (double r : sim::decode_rates(c, Strategy::AF)) EXPECT_DOUBLE_EQ(r, relay::decoding_rate_af(c.links[0]));
}

TEST(Simulator, IdealChannelsDeliverEverySlot) {
  auto c = small_table2(2, 2000);
  c.channels = 3;
  c.n_links = 1;
  c.markov = channel::MarkovChannelModel::from_transitions(1.0, 1.0);
  c.sensors.assign(3, std::vector<sensing::SensorProfile>(1, {0.0, 0.0}));
  c.links.resize(1);
  c.links[0].kappa = 1e-300;
  c.equalized_relay_rate.reset();
  const auto st = sim::run_scenario(c, Strategy::DL);
  EXPECT_DOUBLE_EQ(st.mean_bps, 3 * c.packet_bits / c.slot_seconds);
  EXPECT_DOUBLE_EQ(st.std_error_bps, 0.0);
  EXPECT_NEAR(sim::analytical_capacity(c, Strategy::DL), st.mean_bps, 1e-6);
}

TEST(Simulator, DeterministicAndStrategyIndependent) {
  const auto c = small_table2(3, 4000);
  const auto all = sim::run_all_strategies(c);
  for (auto s : access::kAllStrategies) {
    const auto a = sim::run_scenario(c, s);
    const auto b = sim::run_scenario(c, s);
    EXPECT_EQ(a.samples_bps, b.samples_bps);
    EXPECT_EQ(a.samples_bps, all[static_cast<std::size_t>(s)].samples_bps);
    EXPECT_EQ(a.collision_rate, all[static_cast<std::size_t>(s)].collision_rate);
  }
}

TEST(Simulator, MeanTracksAnalyticalCapacity) {
  auto c = small_table2(6, 40000);
  c.equalized_relay_rate.reset();
  const auto all = sim::run_all_strategies(c);
  for (auto s : access::kAllStrategies) {
    const auto& st = all[static_cast<std::size_t>(s)];
    EXPECT_NEAR(st.mean_bps, sim::analytical_capacity(c, s), 4.0 * st.std_error_bps + 1.0);
    EXPECT_GT(st.ci95_bps, st.std_error_bps);
  }
}

TEST(Simulator, CollisionRateWithinTolerance) {
  const auto c = small_table2(4, 100000);
  const auto st = sim::run_scenario(c, Strategy::DF);
  ASSERT_EQ(st.collision_rate.size(), 5u);
  // Busy slots per channel: roughly eta * horizon * seeds.
  const double busy = c.markov.eta * static_cast<double>(c.horizon) * static_cast<double>(c.seeds.size());
  const double sd = std::sqrt(c.gamma * (1.0 - c.gamma) / busy);
  for (double r : st.collision_rate) EXPECT_LE(r, c.gamma + 3.0 * sd);
}

TEST(Simulator, WithParameter) {
  const auto c = small_table2();
  const auto m8 = sim::with_parameter(c, sim::SweepParameter::Channels, 8);
  EXPECT_EQ(m8.channels, 8);
  EXPECT_EQ(m8.sensors.size(), 8u);
  EXPECT_NO_THROW(m8.validate());

  const auto e = sim::with_parameter(c, sim::SweepParameter::Eta, 0.45);
  EXPECT_DOUBLE_EQ(e.markov.lambda, c.markov.lambda);
  EXPECT_NEAR(e.markov.eta, 0.45, 1e-12);

  const auto p = sim::with_parameter(c, sim::SweepParameter::RelayPower, 13.0);
  for (const auto& l : p.links) {
    EXPECT_NEAR(l.p_r, dbm_to_watts(13.0), 1e-15);
    EXPECT_DOUBLE_EQ(l.p_s, c.links[0].p_s);
  }
  EXPECT_FALSE(p.equalized_relay_rate.has_value());

  EXPECT_EQ(sim::parse_sweep_parameter("relay-power"), sim::SweepParameter::RelayPower);
  EXPECT_EQ(sim::parse_sweep_parameter(sim::to_string(sim::SweepParameter::Eta)), sim::SweepParameter::Eta);
  EXPECT_THROW(sim::parse_sweep_parameter("power"), DomainError);
  EXPECT_THROW(sim::with_parameter(c, sim::SweepParameter::Channels, 2.5), DomainError);
}

TEST(Simulator, SweepShapeAndCsv) {
  const auto c = small_table2(2, 2000);
  EXPECT_THROW(sim::sweep(c, sim::SweepParameter::Channels, {}), DomainError);
  const std::vector<double> grid{1, 2, 3};
  const auto rows = sim::sweep(c, sim::SweepParameter::Channels, grid);
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_DOUBLE_EQ(rows[i].param_value, grid[i / 3]);
    EXPECT_EQ(rows[i].stats.strategy, access::kAllStrategies[i % 3]);
  }
  std::ostringstream os;
  sim::write_sweep_csv(os, rows);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "param_value,strategy,throughput_mean_bps,ci95_bps,analytical_bps");
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
  }
  EXPECT_EQ(n, 9);
}

TEST(Simulator, DirectLinkIgnoresRelayPower) {
  const auto c = small_table2(2, 4000);
  const std::vector<double> grid{2.0, 10.0, 18.0};
  const auto rows = sim::sweep(c, sim::SweepParameter::RelayPower, grid);
  std::vector<double> dl;
  for (const auto& r : rows)
    if (r.stats.strategy == Strategy::DL) dl.push_back(r.stats.mean_bps);
  ASSERT_EQ(dl.size(), 3u);
  EXPECT_DOUBLE_EQ(dl[0], dl[1]);
  EXPECT_DOUBLE_EQ(dl[1], dl[2]);
}
