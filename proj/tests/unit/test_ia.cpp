#include <gtest/gtest.h>

#include <random>

#include "crlab/error.hpp"
#include "crlab/ia.hpp"

using namespace crlab;

namespace {

ia::GainMatrix random_gains(std::mt19937_64& rng, int k, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  ia::GainMatrix m(k, n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return m;
}

}  // namespace

TEST(Ia, TwoByTwoAlignment) {
  EXPECT_TRUE(ia::two_by_two_alignment(Eigen::Matrix2d::Identity()).isApprox(Eigen::Matrix2d::Identity()));
  Eigen::Matrix2d d;
  d << 2, 0, 0, 4;
  Eigen::Matrix2d expected;
  expected << 0.5, 0, 0, 0.25;
  EXPECT_LT((ia::two_by_two_alignment(d) - expected).cwiseAbs().maxCoeff(), 1e-15);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Matrix2d g = random_gains(rng, 2, 2);
    const auto a = ia::two_by_two_alignment(g);
    EXPECT_LT((g.transpose() * a - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-10);
  }
  Eigen::Matrix2d s;
  s << 1, 2, 2, 4;
  EXPECT_THROW(ia::two_by_two_alignment(s), SingularMatrixError);
}

TEST(Ia, Feasibility) {
  EXPECT_TRUE(ia::feasibility(3, 4));
  EXPECT_TRUE(ia::feasibility(4, 4));
  EXPECT_FALSE(ia::feasibility(5, 4));
}

TEST(Ia, SquareSystemHasNoPrefix) {
  std::mt19937_64 rng(2);
  const auto g = random_gains(rng, 3, 3);
  EXPECT_EQ(ia::shared_prefix(g).cols(), 0);
  const auto bases = ia::compute_bases(g);
  for (const auto& b : bases) EXPECT_EQ(b.width(), 1);
}

TEST(Ia, BasisProperties) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + static_cast<int>(rng() % 5);
    const int n = 1 + static_cast<int>(rng() % k);
    const auto g = random_gains(rng, k, n);
    const auto prefix = ia::shared_prefix(g);
    ASSERT_EQ(prefix.cols(), k - n);
    if (prefix.cols() > 0) EXPECT_LT((g.transpose() * prefix).cwiseAbs().maxCoeff(), 1e-10);
    const auto bases = ia::compute_bases(g);
    ASSERT_EQ(static_cast<int>(bases.size()), n);
    for (int j = 0; j < n; ++j) {
      const auto& e = bases[j].e;
      ASSERT_EQ(e.rows(), k);
      ASSERT_EQ(bases[j].width(), k - n + 1);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
      EXPECT_EQ(lu.rank(), k - n + 1);
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        EXPECT_LT((e.transpose() * g.col(i)).cwiseAbs().maxCoeff(), 1e-9 * g.col(i).norm());
      }
      EXPECT_GT(std::abs(bases[j].last().dot(g.col(j))), 1e-9);
      if (k > n) EXPECT_LT((e.leftCols(k - n) - bases[0].e.leftCols(k - n)).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(Ia, ReconstructedWeightsZeroForce) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> c(0.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    const int k = 2 + static_cast<int>(rng() % 5);
    const int n = 2 + static_cast<int>(rng() % (k - 1));
    const auto g = random_gains(rng, k, n);
    const auto bases = ia::compute_bases(g);
    std::vector<Eigen::VectorXd> coeffs;
    for (const auto& b : bases) {
      Eigen::VectorXd v(b.width());
      for (int i = 0; i < v.size(); ++i) v(i) = c(rng);
      coeffs.push_back(v);
    }
    const auto a = ia::reconstruct_weights(bases, coeffs);
    EXPECT_LT(ia::zero_forcing_residual(g, a), 1e-9);
    // Independent check of the residual.
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m)
        if (j != m) worst = std::max(worst, std::abs(a.col(j).dot(g.col(m))));
    EXPECT_NEAR(ia::zero_forcing_residual(g, a), worst, 1e-15);
  }
}

TEST(Ia, RankDeficiencyNamesColumn) {
  ia::GainMatrix g(4, 3);
  g << 1, 2, 0, 0, 0, 1, 1, 2, 0, 0, 0, 1;  // column 1 = 2 * column 0
  try {
    ia::check_rank(g);
    FAIL() << "expected RankDeficientError";
  } catch (const RankDeficientError& e) {
    EXPECT_EQ(e.column(), 1);
  }
  EXPECT_THROW(ia::compute_bases(g), RankDeficientError);
  ia::GainMatrix near = g;
  near(0, 1) += 1e-12;
  EXPECT_THROW(ia::compute_bases(near), RankDeficientError);
  EXPECT_THROW(ia::compute_bases(ia::GainMatrix(2, 3)), DomainError);
}

TEST(Ia, EffectiveGain) {
  std::mt19937_64 rng(5);
  std::vector<ia::GainMatrix> h{random_gains(rng, 3, 3), random_gains(rng, 3, 3)};
  ChannelAllocation all(3, 1, {0});
  for (int j = 0; j < 3; ++j) all.set(j, 0, true);
  const std::vector<ia::GainMatrix> h0{h[0]};
  const auto single = ia::effective_gain(all, h0);
  EXPECT_TRUE(single.g.isApprox(h[0]));

  ChannelAllocation mixed(3, 2, {0, 1});
  mixed.set(0, 1, true);
  mixed.set(2, 0, true);
  const auto eff = ia::effective_gain(mixed, h);
  EXPECT_EQ(eff.assigned, (std::vector<bool>{true, false, true}));
  EXPECT_TRUE(eff.g.col(0).isApprox(h[1].col(0)));
  EXPECT_TRUE(eff.g.col(1).isZero(0.0));
  EXPECT_TRUE(eff.g.col(2).isApprox(h[0].col(2)));

  const std::vector<int> avail{0, 1};
  EXPECT_TRUE(ia::bonded_gain(h, avail).isApprox(h[0] + h[1]));
  const std::vector<int> only1{1};
  EXPECT_TRUE(ia::bonded_gain(h, only1).isApprox(h[1]));
}

TEST(Ia, PsnrIncrease) {
  std::mt19937_64 rng(6);
  const auto g = random_gains(rng, 4, 2);
  const auto bases = ia::compute_bases(g);
  EXPECT_DOUBLE_EQ(ia::psnr_increase(0.0, bases[0], g.col(0), 4.0, 1.0, 10.0, 1.0), 0.0);
  const double unit = 1.0 / bases[0].last().dot(g.col(0));
  EXPECT_NEAR(ia::psnr_increase(unit, bases[0], g.col(0), 1.0, 1.0, 1.0, 1.0), 1.0, 1e-12);
  std::normal_distribution<double> c(0.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd coeff(bases[j].width());
      for (int i = 0; i < coeff.size(); ++i) coeff(i) = c(rng);
      const Eigen::VectorXd a = bases[j].e * coeff;
      const double reduced = ia::psnr_increase(coeff(coeff.size() - 1), bases[j], g.col(j), 4.1, 1.0, 10.0, 0.5);
      EXPECT_NEAR(reduced, ia::psnr_increase_from_weights(a, g.col(j), 4.1, 1.0, 10.0, 0.5), 1e-10);
    }
  }
}

TEST(Ia, VariableCounts) {
  const auto v = ia::variable_counts(3, 4);
  EXPECT_EQ(v.primal_original, 12);
  EXPECT_EQ(v.primal_reduced, 6);
  EXPECT_EQ(v.dual_original, 3 * 2 + 4);
  EXPECT_EQ(v.dual_reduced, 4);
}

TEST(Ia, ChannelAllocationChecks) {
  ChannelAllocation b(3, 2, {1});
  b.set(0, 1, true);
  EXPECT_EQ(b.channel_of(0), 1);
  EXPECT_EQ(b.channel_of(1), -1);
  EXPECT_NO_THROW(b.check(2));
  b.set(1, 1, true);
  b.set(2, 1, true);
  EXPECT_THROW(b.check(2), DomainError);
  ChannelAllocation c(2, 2, {0});
  c.set(0, 1, true);
  EXPECT_THROW(c.check(2), DomainError);
  ChannelAllocation d(2, 2, {0, 1});
  d.set(0, 0, true);
  d.set(0, 1, true);
  EXPECT_THROW(d.check(2), DomainError);
}
