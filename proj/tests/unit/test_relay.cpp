#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crlab/error.hpp"
#include "crlab/relay.hpp"

using namespace crlab;
using relay::RelayLink;

namespace {

RelayLink unit_link() {
  RelayLink l;
  l.p_s = l.p_r = 10.0;
  l.noise_relay = l.noise_dest = 1.0;
  l.mean_g0 = l.mean_g1 = l.mean_g2 = 1.0;
  l.kappa = 1.0;
  return l;
}

struct McRates {
  double df, af, dl;
  int n;
};

// Samples per-hop exponential gains and counts SNR >= kappa.
McRates sample_rates(const RelayLink& l, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> g0(1.0 / l.mean_g0), g1(1.0 / l.mean_g1), g2(1.0 / l.mean_g2);
  int df = 0, af = 0, dl = 0;
  for (int i = 0; i < n; ++i) {
    const double a = g1(rng), b = g2(rng), c = g0(rng);
    const double snr1 = l.p_s * a / l.noise_relay, snr2 = l.p_r * b / l.noise_dest;
    df += snr1 >= l.kappa && snr2 >= l.kappa;
    // Received SNR of an amplified relay signal with gain normalized by the relay input power.
    const double end_to_end = (l.p_s * a * l.p_r * b) / ((l.p_s * a + l.noise_relay) * l.noise_dest);
    af += end_to_end >= l.kappa;
    dl += l.p_s * c / l.noise_dest >= l.kappa;
  }
  return {static_cast<double>(df) / n, static_cast<double>(af) / n, static_cast<double>(dl) / n, n};
}

double sigma(double p, int n) { return std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST(Relay, ClosedFormExamples) {
  const auto l = unit_link();
  EXPECT_NEAR(relay::decoding_rate_df(l), std::exp(-0.2), 1e-15);
  EXPECT_NEAR(relay::decoding_rate_df(l), 0.8187, 1e-4);
  EXPECT_NEAR(relay::decoding_rate_dl(l), std::exp(-0.1), 1e-15);
  EXPECT_NEAR(relay::decoding_rate_dl(l), 0.9048, 1e-4);
}

TEST(Relay, LimitsInKappa) {
  auto l = unit_link();
  l.kappa = 1e-12;
  EXPECT_NEAR(relay::decoding_rate_df(l), 1.0, 1e-9);
  EXPECT_NEAR(relay::decoding_rate_af(l), 1.0, 1e-6);
  EXPECT_NEAR(relay::decoding_rate_dl(l), 1.0, 1e-9);
  l.kappa = 1e6;
  EXPECT_NEAR(relay::decoding_rate_dl(l), 0.0, 1e-12);
}

TEST(Relay, DirectRateScaleInvariance) {
  auto l = unit_link();
  l.kappa = 2.3;
  const double base = relay::decoding_rate_dl(l);
  l.p_s *= 2.0;
  l.kappa *= 2.0;
  EXPECT_NEAR(relay::decoding_rate_dl(l), base, 1e-15);
}

TEST(Relay, AfSaturatesForHugeRelayPower) {
  auto l = unit_link();
  double previous = 0.0;
  for (double p : {10.0, 1e3, 1e6, 1e9}) {
    l.p_r = p;
    const double af = relay::decoding_rate_af(l);
    EXPECT_GE(af, previous - 1e-9);
    previous = af;
  }
  EXPECT_NEAR(previous, 1.0, 1e-6);
}

TEST(Relay, RatesMatchMonteCarlo) {
  std::vector<RelayLink> cases{unit_link()};
  {
    RelayLink t;  // Table II link
    t.p_s = t.p_r = 0.01;
    t.noise_relay = t.noise_dest = 1e-3;
    t.mean_g0 = 0.2;
    t.kappa = 3.0;
    cases.push_back(t);
  }
  {
    auto l = unit_link();
    l.p_r = 2.0;
    l.mean_g1 = 0.5;
    l.mean_g2 = 3.0;
    l.kappa = 2.0;
    cases.push_back(l);
  }
  std::uint64_t seed = 100;
  for (const auto& l : cases) {
    const auto mc = sample_rates(l, 1'000'000, seed++);
    const double df = relay::decoding_rate_df(l), af = relay::decoding_rate_af(l), dl = relay::decoding_rate_dl(l);
    EXPECT_NEAR(df, mc.df, 0.002);
    EXPECT_NEAR(af, mc.af, 3 * sigma(af, mc.n) + 1e-6);
    EXPECT_NEAR(dl, mc.dl, 3 * sigma(dl, mc.n) + 1e-6);
  }
}

TEST(Relay, RatesAreMonotone) {
  const auto base = unit_link();
  for (auto rate : {&relay::decoding_rate_df, &relay::decoding_rate_af, &relay::decoding_rate_dl}) {
    double prev = 2.0;
    for (double k = 0.1; k < 50.0; k *= 1.7) {
      auto l = base;
      l.kappa = k;
      const double v = rate(l);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_LE(v, prev + 1e-9);
      prev = v;
    }
    prev = -1.0;
    for (double p = 0.1; p < 100.0; p *= 2.0) {
      auto l = base;
      l.p_s = p;
      const double v = rate(l);
      EXPECT_GE(v, prev - 1e-9);
      prev = v;
    }
    prev = -1.0;
    for (double p = 0.1; p < 100.0; p *= 2.0) {
      auto l = base;
      l.p_r = p;
      const double v = rate(l);
      EXPECT_GE(v, prev - 1e-9);
      prev = v;
    }
  }
}

TEST(Relay, InvalidLinkRejected) {
  auto l = unit_link();
  l.kappa = 0.0;
  EXPECT_THROW(relay::decoding_rate_df(l), DomainError);
  l = unit_link();
  l.mean_g1 = -1.0;
  EXPECT_THROW(relay::decoding_rate_af(l), DomainError);
}
