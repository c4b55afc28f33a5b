#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "crlab/error.hpp"
#include "crlab/sensing.hpp"

using namespace crlab;
using sensing::SensingOutcome;
using sensing::SensorProfile;

namespace {

std::vector<SensorProfile> one(double eps, double delta) { return {SensorProfile{eps, delta}}; }

std::vector<SensorProfile> random_profiles(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.01, 0.45);
  std::vector<SensorProfile> s;
  for (int i = 0; i < n; ++i) s.push_back({u(rng), u(rng)});
  return s;
}

}  // namespace

TEST(Sensing, ConditionalAvailabilityExamples) {
  const auto s = one(0.3, 0.3);
  EXPECT_NEAR(sensing::conditional_availability(0.6, s, SensingOutcome{{0}}), 1.0 / (1.0 + 1.5 * 0.3 / 0.7), 1e-12);
  EXPECT_NEAR(sensing::conditional_availability(0.6, s, SensingOutcome{{0}}), 0.6087, 1e-4);
  EXPECT_NEAR(sensing::conditional_availability(0.6, s, SensingOutcome{{1}}), 0.2222, 1e-4);
  EXPECT_DOUBLE_EQ(sensing::conditional_availability(0.4, one(0.0, 0.0), SensingOutcome{{0}}), 1.0);
}

TEST(Sensing, DegeneratePriors) {
  const auto s = one(0.2, 0.1);
  EXPECT_DOUBLE_EQ(sensing::conditional_availability(1.0, s, SensingOutcome{{0}}), 0.0);
  EXPECT_DOUBLE_EQ(sensing::conditional_availability(0.0, s, SensingOutcome{{1}}), 1.0);
}

TEST(Sensing, LengthMismatchRejected) {
  EXPECT_THROW(sensing::conditional_availability(0.5, one(0.1, 0.1), SensingOutcome{{0, 1}}), DomainError);
}

TEST(Sensing, ProfileValidation) {
  EXPECT_THROW(SensorProfile({1.0, 0.1}).validate(), DomainError);
  EXPECT_THROW(SensorProfile({0.1, -0.1}).validate(), DomainError);
  EXPECT_TRUE(SensorProfile({0.1, 0.1}).validate());
  EXPECT_FALSE(SensorProfile({0.6, 0.5}).validate());
}

TEST(Sensing, IterativeExamples) {
  const SensorProfile p{0.3, 0.3};
  const double first = sensing::conditional_availability(0.6, one(0.3, 0.3), SensingOutcome{{0}});
  EXPECT_NEAR(sensing::iterative_availability(first, p, 0), 0.7840, 1e-4);
  EXPECT_DOUBLE_EQ(sensing::iterative_availability(1.0, SensorProfile{0.0, 0.0}, 0), 1.0);
  EXPECT_DOUBLE_EQ(sensing::iterative_availability(0.0, p, 0), 0.0);
  EXPECT_NEAR(sensing::iterative_availability(sensing::iterative_availability(0.4, p, 1), p, 0),
              sensing::iterative_availability(sensing::iterative_availability(0.4, p, 0), p, 1), 1e-15);
}

TEST(Sensing, IterativeFoldMatchesBatchInAnyOrder) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const auto s = random_profiles(rng, n);
    const double eta = u(rng);
    const unsigned bits = static_cast<unsigned>(rng()) & ((1u << n) - 1);
    const double batch = sensing::conditional_availability(eta, s, SensingOutcome::from_bits(bits, n));
    EXPECT_NEAR(batch, oracle::posterior_idle(eta, s, bits), 1e-12 * batch);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    double a = 1.0 - eta;
    for (int i : order) a = sensing::iterative_availability(a, s[i], (bits >> i) & 1u);
    EXPECT_NEAR(a, batch, 1e-12 * batch);
  }
}

TEST(Sensing, EnumerationSortedAndComplete) {
  const auto t1 = sensing::enumerate_thresholds(0.6, one(0.3, 0.3));
  ASSERT_EQ(t1.entries.size(), 2u);
  EXPECT_NEAR(t1.entries[0].availability, 0.6087, 1e-4);
  EXPECT_EQ(t1.entries[0].outcome.readings, std::vector<std::uint8_t>{0});
  EXPECT_NEAR(t1.entries[1].availability, 0.2222, 1e-4);

  const std::vector<SensorProfile> two(2, SensorProfile{0.3, 0.3});
  const auto t2 = sensing::enumerate_thresholds(0.6, two);
  ASSERT_EQ(t2.entries.size(), 4u);
  EXPECT_EQ(t2.entries.front().outcome.readings, (std::vector<std::uint8_t>{0, 0}));
  EXPECT_EQ(t2.entries.back().outcome.readings, (std::vector<std::uint8_t>{1, 1}));
  EXPECT_NEAR(t2.entries[1].availability, t2.entries[2].availability, 1e-15);

  const std::vector<SensorProfile> perfect(3, SensorProfile{0.0, 0.0});
  const auto tp = sensing::enumerate_thresholds(0.5, perfect);
  // Conflicting perfect readings have zero probability and fall back to the prior.
  for (const auto& e : tp.entries) {
    EXPECT_TRUE(e.availability == 0.0 || e.availability == 1.0 || e.availability == 0.5);
  }
  EXPECT_DOUBLE_EQ(tp.entries.front().availability, 1.0);
  EXPECT_DOUBLE_EQ(tp.entries.back().availability, 0.0);

  std::mt19937_64 rng(5);
  for (int n = 1; n <= 8; ++n) {
    const auto s = random_profiles(rng, n);
    const auto t = sensing::enumerate_thresholds(0.45, s);
    ASSERT_EQ(t.entries.size(), std::size_t{1} << n);
    double l0 = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
      if (i > 0) EXPECT_LE(t.entries[i].availability, t.entries[i - 1].availability);
      l0 += t.entries[i].likelihood_idle;
      l1 += t.entries[i].likelihood_busy;
    }
    EXPECT_NEAR(l0, 1.0, 1e-12);
    EXPECT_NEAR(l1, 1.0, 1e-12);
  }
}

TEST(Sensing, EnumerationGuard) {
  const std::vector<SensorProfile> many(sensing::kMaxEnumeratedSensors + 1, SensorProfile{0.1, 0.1});
  EXPECT_THROW(sensing::enumerate_thresholds(0.5, many), CapacityError);
}

TEST(Sensing, ThresholdExamples) {
  const auto s = one(0.3, 0.3);
  const auto strict = sensing::optimal_threshold(0.6, s, 0.08);
  EXPECT_NEAR(strict.tau_star, 0.6087, 1e-4);
  EXPECT_DOUBLE_EQ(strict.collision_prob, 0.0);
  EXPECT_DOUBLE_EQ(strict.detection_prob, 0.0);

  const auto loose = sensing::optimal_threshold(0.6, s, 0.35);
  EXPECT_NEAR(loose.tau_star, 0.2222, 1e-4);
  EXPECT_NEAR(loose.collision_prob, 0.3, 1e-12);
  EXPECT_NEAR(loose.detection_prob, 0.7, 1e-12);

  const auto all = sensing::optimal_threshold(0.6, s, 1.0);
  EXPECT_LT(all.tau_star, 0.2222);
  EXPECT_NEAR(all.collision_prob, 1.0, 1e-12);
  EXPECT_NEAR(all.detection_prob, 1.0, 1e-12);
}

TEST(Sensing, ZeroUtilizationAdmitsEverything) {
  const auto d = sensing::optimal_threshold(0.0, one(0.2, 0.2), 0.01);
  EXPECT_NEAR(d.detection_prob, 1.0, 1e-12);
}

TEST(Sensing, TiesAreAdmittedAsBlock) {
  // Two identical sensors: outcomes 01 and 10 tie. Their joint busy mass must
  // not be split to squeeze under gamma.
  const std::vector<SensorProfile> two(2, SensorProfile{0.3, 0.3});
  const double gamma = 0.09 + 0.21;  // 00 costs 0.09, each mixed outcome 0.21
  const auto d = sensing::optimal_threshold(0.6, two, gamma);
  EXPECT_NEAR(d.collision_prob, 0.09, 1e-12);
  const auto e = sensing::optimal_threshold(0.6, two, 0.51 + 1e-12);
  EXPECT_NEAR(e.collision_prob, 0.51, 1e-12);
}

TEST(Sensing, ThresholdMatchesBruteForceAndIsMaximal) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    auto s = random_profiles(rng, n);
    if (trial % 3 == 0) std::fill(s.begin(), s.end(), s.front());
    const double eta = 0.05 + 0.9 * u(rng);
    const double gamma = 0.01 + 0.9 * u(rng);
    const auto table = sensing::enumerate_thresholds(eta, s);
    const auto d = sensing::optimal_threshold(table, gamma);
    const auto b = oracle::brute_force_threshold(eta, s, gamma);
    EXPECT_LE(d.collision_prob, gamma + 1e-15);
    EXPECT_NEAR(d.collision_prob, b.collision, 1e-12);
    EXPECT_NEAR(d.detection_prob, b.detection, 1e-12);
    if (std::isinf(b.tau)) {
      EXPECT_TRUE(std::isinf(d.tau_star));
    } else {
      EXPECT_NEAR(d.tau_star, b.tau, 1e-12);
    }
    // Admitting the next block would break the constraint.
    if (d.optimal_index < table.entries.size()) {
      double extra = 0.0;
      const double v = table.entries[d.optimal_index].availability;
      for (std::size_t i = d.optimal_index; i < table.entries.size(); ++i) {
        if (std::abs(table.entries[i].availability - v) > sensing::kTieTolerance * v) break;
        extra += table.entries[i].likelihood_busy;
      }
      EXPECT_GT(d.collision_prob + extra, gamma);
    }
  }
}

TEST(Sensing, RatesMonotoneAlongTable) {
  std::mt19937_64 rng(9);
  const auto s = random_profiles(rng, 4);
  const auto t = sensing::enumerate_thresholds(0.6, s);
  double col = 0.0, det = 0.0;
  for (double gamma = 0.0; gamma <= 1.0; gamma += 0.02) {
    const auto d = sensing::optimal_threshold(t, gamma);
    EXPECT_GE(d.collision_prob, col - 1e-15);
    EXPECT_GE(d.detection_prob, det - 1e-15);
    col = d.collision_prob;
    det = d.detection_prob;
  }
}

TEST(Sensing, AccessProbability) {
  EXPECT_DOUBLE_EQ(sensing::access_probability(1.0, 0.2), 1.0);
  EXPECT_NEAR(sensing::access_probability(0.6087, 0.2), 0.2 / 0.3913, 1e-12);
  EXPECT_NEAR(sensing::access_probability(0.4, 0.2), 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(sensing::access_probability(0.9, 0.2), 1.0);
}

TEST(Sensing, DrawnReadingsFollowProfile) {
  std::mt19937_64 rng(1);
  const SensorProfile p{0.15, 0.25};
  const int n = 100'000;
  int fa = 0, md = 0;
  for (int i = 0; i < n; ++i) {
    fa += sensing::draw_reading(p, false, rng);
    md += 1 - sensing::draw_reading(p, true, rng);
  }
  EXPECT_NEAR(static_cast<double>(fa) / n, 0.15, 4 * std::sqrt(0.15 * 0.85 / n));
  EXPECT_NEAR(static_cast<double>(md) / n, 0.25, 4 * std::sqrt(0.25 * 0.75 / n));
}
