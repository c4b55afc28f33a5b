#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of them call the library routine they check.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "crlab/access.hpp"
#include "crlab/sensing.hpp"
#include "crlab/solver.hpp"

namespace oracle {

// Posterior idle probability straight from Bayes' rule over the joint likelihoods.
inline double posterior_idle(double eta, const std::vector<crlab::sensing::SensorProfile>& s, unsigned bits) {
  double l0 = 1.0 - eta, l1 = eta;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool busy = (bits >> i) & 1u;
    l0 *= busy ? s[i].false_alarm : 1.0 - s[i].false_alarm;
    l1 *= busy ? 1.0 - s[i].miss_detection : s[i].miss_detection;
  }
  return l0 / (l0 + l1);
}

inline double likelihood(const std::vector<crlab::sensing::SensorProfile>& s, unsigned bits, bool occupied) {
  double p = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool busy = (bits >> i) & 1u;
    if (occupied) {
      p *= busy ? 1.0 - s[i].miss_detection : s[i].miss_detection;
    } else {
      p *= busy ? s[i].false_alarm : 1.0 - s[i].false_alarm;
    }
  }
  return p;
}

struct BruteThreshold {
  double tau = 0.0;
  double collision = 0.0;
  double detection = 0.0;
};

// Tries every threshold in {all posterior values} plus -inf, with access iff
// a > tau. Keeps the feasible one with the most detection; among equals the
// smallest threshold. Posterior values within 1e-12 relative are one value.
inline BruteThreshold brute_force_threshold(double eta, const std::vector<crlab::sensing::SensorProfile>& s,
                                            double gamma) {
  const unsigned n = 1u << s.size();
  std::vector<double> a(n);
  for (unsigned b = 0; b < n; ++b) a[b] = posterior_idle(eta, s, b);
  std::vector<double> candidates(a);
  candidates.push_back(-std::numeric_limits<double>::infinity());
  auto same = [](double x, double y) {
    if (std::isinf(x) || std::isinf(y)) return x == y;
    return x == y || std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y));
  };
  BruteThreshold best{std::numeric_limits<double>::infinity(), 0.0, -1.0};
  for (double tau : candidates) {
    double col = 0.0, det = 0.0;
    for (unsigned b = 0; b < n; ++b) {
      if (a[b] > tau && !same(a[b], tau)) {
        col += likelihood(s, b, true);
        det += likelihood(s, b, false);
      }
    }
    if (col > gamma + 1e-15) continue;
    if (det > best.detection + 1e-15 || (std::abs(det - best.detection) <= 1e-15 && tau < best.tau)) {
      best = {tau, col, det};
    }
  }
  return best;
}

// Frames in a slot pair from the raw odd/even counts.
inline int frames(crlab::access::Strategy s, int odd, int even) {
  switch (s) {
    case crlab::access::Strategy::DF: return std::min(odd, even);
    case crlab::access::Strategy::AF: return odd / 2 + even / 2;
    case crlab::access::Strategy::DL: return odd + even;
  }
  return 0;
}

// E[N] by walking all 16^M joint (D_od, S_od, D_ev, S_ev) states.
inline double enumerate_expected_frames(const crlab::access::SlotPairDistribution& dist,
                                        crlab::access::Strategy strategy) {
  const std::size_t m = dist.channels.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= 16;
  double e = 0.0;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    double p = 1.0;
    int odd = 0, even = 0;
    for (std::size_t ch = 0; ch < m; ++ch) {
      const std::size_t state = c % 16;
      c /= 16;
      p *= dist.channels[ch][state];
      const int d_od = (state >> 3) & 1, s_od = (state >> 2) & 1, d_ev = (state >> 1) & 1, s_ev = state & 1;
      odd += (d_od == 0 && s_od == 0);
      even += (d_ev == 0 && s_ev == 0);
    }
    e += p * frames(strategy, odd, even);
  }
  return e;
}

// E[N] over the 4^M joint states of the per-channel (odd, even)
// idle-and-accessed indicators.
inline double enumerate_indicator_states(const crlab::access::SlotPairDistribution& dist,
                                         crlab::access::Strategy strategy) {
  const std::size_t m = dist.channels.size();
  std::vector<std::array<double, 4>> law(m);
  for (std::size_t ch = 0; ch < m; ++ch) {
    law[ch].fill(0.0);
    for (std::size_t state = 0; state < 16; ++state) {
      const bool odd = ((state >> 3) & 1) == 0 && ((state >> 2) & 1) == 0;
      const bool even = ((state >> 1) & 1) == 0 && (state & 1) == 0;
      law[ch][(odd ? 2 : 0) + (even ? 1 : 0)] += dist.channels[ch][state];
    }
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= 4;
  double e = 0.0;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    double p = 1.0;
    int odd = 0, even = 0;
    for (std::size_t ch = 0; ch < m; ++ch) {
      const std::size_t s = c % 4;
      c /= 4;
      p *= law[ch][s];
      odd += static_cast<int>(s >> 1);
      even += static_cast<int>(s & 1);
    }
    e += p * frames(strategy, odd, even);
  }
  return e;
}

// One solver instance with N = 2 users on K = 3 transmitters, solved by a
// zooming grid over the weights. Each user's weight lives in the plane
// orthogonal to the other user's gain column, spanned by v (the own gain
// projected into that plane) and u (orthogonal to both); only the v
// component reaches the user.
inline double grid_optimum(const crlab::solver::Problem& p, int points = 25, int rounds = 12) {
  struct User {
    Eigen::Vector3d u, v;
    double gain_v = 0.0;
  };
  User users[2];
  for (int j = 0; j < 2; ++j) {
    const Eigen::Vector3d other = p.gains.col(1 - j).normalized();
    const Eigen::Vector3d own = p.gains.col(j);
    const Eigen::Vector3d v = (own - own.dot(other) * other).normalized();
    users[j] = {other.cross(v), v, v.dot(own)};
  }
  auto value = [&](int j, double y) {
    const auto& t = p.users[static_cast<std::size_t>(j)];
    const double s = y * users[j].gain_v;
    const double lambda = t.rate_coeff * std::log2(1.0 + s * s / p.noise);
    return t.success_prob * std::log(t.psnr + lambda) + (1.0 - t.success_prob) * std::log(t.psnr);
  };
  const double bound = std::sqrt(3.0 * p.p_max);
  std::array<double, 4> lo{-bound, 0.0, -bound, 0.0}, hi{bound, bound, bound, bound};
  double best = value(0, 0.0) + value(1, 0.0);
  std::array<double, 4> arg{0, 0, 0, 0};
  for (int round = 0; round < rounds; ++round) {
    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < points; ++idx[0])
      for (idx[1] = 0; idx[1] < points; ++idx[1])
        for (idx[2] = 0; idx[2] < points; ++idx[2])
          for (idx[3] = 0; idx[3] < points; ++idx[3]) {
            std::array<double, 4> c;
            for (int i = 0; i < 4; ++i) c[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (points - 1);
            const Eigen::Vector3d a0 = c[0] * users[0].u + c[1] * users[0].v;
            const Eigen::Vector3d a1 = c[2] * users[1].u + c[3] * users[1].v;
            const Eigen::Vector3d power = a0.cwiseAbs2() + a1.cwiseAbs2();
            if (power.maxCoeff() > p.p_max) continue;
            const double v = value(0, c[1]) + value(1, c[3]);
            if (v > best) {
              best = v;
              arg = c;
            }
          }
    for (int i = 0; i < 4; ++i) {
      const double w = (hi[i] - lo[i]) / 4.0;
      lo[i] = arg[i] - w;
      hi[i] = arg[i] + w;
      if (i % 2 == 1) lo[i] = std::max(0.0, lo[i]);
    }
  }
  return best;
}

// Random N = 2, K = 3 instance with Rayleigh amplitudes.
inline crlab::solver::Problem random_problem(std::uint64_t seed, double p_max = 10.0) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  crlab::solver::Problem p;
  p.gains.resize(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) p.gains(i, j) = std::sqrt(ex(rng));
  for (int j = 0; j < 2; ++j) p.users.push_back({25.0 + 5.0 * u(rng), 0.3 + 0.7 * u(rng), 0.35 + 0.1 * u(rng)});
  p.p_max = p_max;
  return p;
}

}  // namespace oracle
