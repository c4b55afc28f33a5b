#pragma once

// User-to-channel assignment without channel bonding: the greedy selection,
// an exhaustive oracle, the competitive-ratio expectation and two
// scheduling heuristics without interference alignment.

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "crlab/channel_allocation.hpp"
#include "crlab/ia.hpp"
#include "crlab/solver.hpp"

namespace crlab::allocation {

/// Objective value of a (possibly partial) allocation. May throw.
using Evaluator = std::function<double(const ChannelAllocation&)>;

struct GreedyResult {
  ChannelAllocation allocation;
  std::vector<double> marginal_gains;  ///< F_l, one per committed step
  double objective = 0.0;              ///< Phi of the final allocation
};

/// Adds the user-channel pair with the largest marginal gain until no
/// candidate is left or no pair improves the objective. Ties go to the
/// lowest (user, channel). A channel leaves the candidate set when it holds
/// `max_per_channel` users. Pairs whose evaluation throws are skipped with a
/// warning.
GreedyResult greedy_select(int users, int channels, std::span<const int> available, int max_per_channel,
                           const Evaluator& phi);

inline constexpr int kMaxBruteForceUsers = 6;
inline constexpr int kMaxBruteForceChannels = 4;

struct BruteForceResult {
  ChannelAllocation allocation;
  double objective = 0.0;
};

/// Exact argmax over every feasible allocation (each user on one available
/// channel or none). Throws CapacityError above 6 users or 4 available channels.
BruteForceResult brute_force_allocation(int users, int channels, std::span<const int> available,
                                        int max_per_channel, const Evaluator& phi);

/// E[chi] = eta^M + sum_{n=1..M} (1/n) C(M,n) eta^(M-n) (1-eta)^n.
double expected_competitive_ratio(double eta, int channels);

/// Inputs shared by the IA objective and the heuristics for one time slot.
struct SlotInstance {
  std::vector<ia::GainMatrix> h;        ///< per channel, K x N
  std::vector<double> access_prob;      ///< P^D per channel
  std::vector<double> psnr;             ///< w_j
  std::vector<double> rate_coeff;       ///< beta_j B / T
  double p_max = 10.0;
  double noise = 1.0;

  int users() const { return static_cast<int>(psnr.size()); }
  int channels() const { return static_cast<int>(h.size()); }
  int transmitters() const { return h.empty() ? 0 : static_cast<int>(h.front().rows()); }
};

/// Per-user outcome of a slot decision: channel, success probability and PSNR gain on success.
struct UserPlan {
  int channel = -1;
  double success_prob = 0.0;
  double lambda = 0.0;
};

/// Solves each channel's user group with the distributed solver and returns
/// the plan of every user. Users of a group that is not zero-forcible get
/// nothing on that channel.
std::vector<UserPlan> ia_plan(const SlotInstance& inst, const ChannelAllocation& b,
                              const solver::Options& options = {});

/// sum_j [P_j log(w_j + lambda_j) + (1 - P_j) log w_j].
double plan_objective(const SlotInstance& inst, std::span<const UserPlan> plan);

/// Normalized gain Phi(b) = sum_j P_j [log(w_j + lambda_j) - log w_j]: zero
/// for the empty allocation. Channel groups are cached, so repeated calls on
/// the same instance are cheap.
class IaEvaluator {
 public:
  explicit IaEvaluator(const SlotInstance& inst, solver::Options options = {});
  double operator()(const ChannelAllocation& b);
  double group_value(int channel, unsigned mask);

 private:
  const SlotInstance* inst_;
  solver::Options options_;
  std::map<std::pair<int, unsigned>, double> cache_;
};

/// Received-power proxy of a user on a channel: sum_k H[m](k, j)^2.
double channel_condition(const SlotInstance& inst, int user, int channel);

/// TDMA with maximum-ratio transmission: each user takes its best available
/// channel; users sharing a channel split the slot equally.
std::vector<UserPlan> heuristic1(const SlotInstance& inst, std::span<const int> available);

/// Each available channel, in ascending order, serves its best not yet
/// served user for the whole slot.
std::vector<UserPlan> heuristic2(const SlotInstance& inst, std::span<const int> available);

}  // namespace crlab::allocation
