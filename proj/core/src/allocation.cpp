#include "crlab/allocation.hpp"

#include <algorithm>
#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "crlab/error.hpp"
#include "crlab/log.hpp"

namespace crlab {

ChannelAllocation::ChannelAllocation(int n_users, int n_channels, std::vector<int> available_channels)
    : users(n_users), channels(n_channels), available(std::move(available_channels)) {
  if (n_users < 0 || n_channels < 0) throw DomainError("allocation dimensions must be non-negative");
  std::sort(available.begin(), available.end());
  available.erase(std::unique(available.begin(), available.end()), available.end());
  for (int m : available) {
    if (m < 0 || m >= n_channels) throw DomainError("available channel " + std::to_string(m) + " out of range");
  }
  b.assign(static_cast<std::size_t>(n_users) * static_cast<std::size_t>(n_channels), 0);
}

int ChannelAllocation::channel_of(int user) const {
  for (int m = 0; m < channels; ++m) {
    if (at(user, m)) return m;
  }
  return -1;
}

std::vector<int> ChannelAllocation::users_on(int channel) const {
  std::vector<int> out;
  for (int j = 0; j < users; ++j) {
    if (at(j, channel)) out.push_back(j);
  }
  return out;
}

bool ChannelAllocation::is_available(int channel) const {
  return std::binary_search(available.begin(), available.end(), channel);
}

void ChannelAllocation::check(int max_per_channel) const {
  for (int j = 0; j < users; ++j) {
    int count = 0;
    for (int m = 0; m < channels; ++m) count += at(j, m);
    if (count > 1) throw DomainError("user " + std::to_string(j) + " receives from more than one channel");
  }
  for (int m = 0; m < channels; ++m) {
    const auto on = users_on(m);
    if (!on.empty() && !is_available(m)) throw DomainError("channel " + std::to_string(m) + " is not available");
    if (static_cast<int>(on.size()) > max_per_channel) {
      throw DomainError("channel " + std::to_string(m) + " holds more users than transmitters");
    }
  }
}

}  // namespace crlab

namespace crlab::allocation {

GreedyResult greedy_select(int users, int channels, std::span<const int> available, int max_per_channel,
                           const Evaluator& phi) {
  if (max_per_channel < 1) throw DomainError("channels must admit at least one user");
  GreedyResult out;
  out.allocation = ChannelAllocation(users, channels, {available.begin(), available.end()});
  std::vector<int> open = out.allocation.available;
  std::vector<bool> placed(static_cast<std::size_t>(users), false);
  double current = phi(out.allocation);
  out.objective = current;

  while (!open.empty()) {
    double best_gain = -std::numeric_limits<double>::infinity();
    double best_value = current;
    int best_user = -1;
    int best_channel = -1;
    for (int j = 0; j < users; ++j) {
      if (placed[static_cast<std::size_t>(j)]) continue;
      for (int m : open) {
        ChannelAllocation trial = out.allocation;
        trial.set(j, m, true);
        double value = 0.0;
        try {
          value = phi(trial);
        } catch (const Error& e) {
          warn("greedy: skipping user " + std::to_string(j) + " on channel " + std::to_string(m) + ": " + e.what());
          continue;
        }
        const double gain = value - current;
        if (gain > best_gain) {
          best_gain = gain;
          best_value = value;
          best_user = j;
          best_channel = m;
        }
      }
    }
    if (best_user < 0 || !(best_gain > 0.0)) break;
    out.allocation.set(best_user, best_channel, true);
    placed[static_cast<std::size_t>(best_user)] = true;
    out.marginal_gains.push_back(best_gain);
    current = best_value;
    if (static_cast<int>(out.allocation.users_on(best_channel).size()) >= max_per_channel) {
      open.erase(std::find(open.begin(), open.end(), best_channel));
    }
    out.allocation.check(max_per_channel);
  }
  out.objective = current;
  return out;
}

BruteForceResult brute_force_allocation(int users, int channels, std::span<const int> available,
                                        int max_per_channel, const Evaluator& phi) {
  ChannelAllocation base(users, channels, {available.begin(), available.end()});
  const int a = static_cast<int>(base.available.size());
  if (users > kMaxBruteForceUsers || a > kMaxBruteForceChannels) {
    throw CapacityError("exhaustive allocation supports at most " + std::to_string(kMaxBruteForceUsers) +
                        " users and " + std::to_string(kMaxBruteForceChannels) + " channels");
  }
  BruteForceResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  std::vector<int> choice(static_cast<std::size_t>(users), 0);  // 0 = none, i = available[i-1]
  while (true) {
    ChannelAllocation b = base;
    std::vector<int> load(static_cast<std::size_t>(a), 0);
    bool ok = true;
    for (int j = 0; j < users && ok; ++j) {
      const int c = choice[static_cast<std::size_t>(j)];
      if (c == 0) continue;
      if (++load[static_cast<std::size_t>(c - 1)] > max_per_channel) ok = false;
      b.set(j, base.available[static_cast<std::size_t>(c - 1)], true);
    }
    if (ok) {
      try {
        const double v = phi(b);
        if (v > best.objective) {
          best.objective = v;
          best.allocation = b;
        }
      } catch (const Error&) {
        // Not zero-forcible; not a candidate.
      }
    }
    int j = 0;
    while (j < users && ++choice[static_cast<std::size_t>(j)] > a) choice[static_cast<std::size_t>(j++)] = 0;
    if (j == users) break;
  }
  return best;
}

double expected_competitive_ratio(double eta, int channels) {
  if (channels < 1) throw DomainError("need at least one channel");
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0,1]");
  const unsigned m = static_cast<unsigned>(channels);
  double e = std::pow(eta, channels);
  for (unsigned n = 1; n <= m; ++n) {
    e += boost::math::binomial_coefficient<double>(m, n) * std::pow(eta, static_cast<double>(m - n)) *
         std::pow(1.0 - eta, static_cast<double>(n)) / static_cast<double>(n);
  }
  return e;
}

namespace {

solver::Problem group_problem(const SlotInstance& inst, int channel, const std::vector<int>& members) {
  const auto& hm = inst.h[static_cast<std::size_t>(channel)];
  solver::Problem p;
  p.gains.resize(hm.rows(), static_cast<Eigen::Index>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i) {
    const int j = members[i];
    p.gains.col(static_cast<Eigen::Index>(i)) = hm.col(j);
    p.users.push_back({inst.psnr[static_cast<std::size_t>(j)], inst.access_prob[static_cast<std::size_t>(channel)],
                       inst.rate_coeff[static_cast<std::size_t>(j)]});
  }
  p.p_max = inst.p_max;
  p.noise = inst.noise;
  return p;
}

}  // namespace

std::vector<UserPlan> ia_plan(const SlotInstance& inst, const ChannelAllocation& b, const solver::Options& options) {
  std::vector<UserPlan> plan(static_cast<std::size_t>(inst.users()));
  for (int m = 0; m < inst.channels(); ++m) {
    const auto members = b.users_on(m);
    if (members.empty()) continue;
    solver::SolveReport report;
    try {
      report = solver::solve(group_problem(inst, m, members), options);
    } catch (const NumericError& e) {
      warn("channel " + std::to_string(m) + " group is not zero-forcible: " + e.what());
      continue;
    }
    const auto& hm = inst.h[static_cast<std::size_t>(m)];
    for (std::size_t i = 0; i < members.size(); ++i) {
      const int j = members[i];
      const double amp = report.weights.col(static_cast<Eigen::Index>(i)).dot(hm.col(j));
      auto& u = plan[static_cast<std::size_t>(j)];
      u.channel = m;
      u.success_prob = inst.access_prob[static_cast<std::size_t>(m)];
      u.lambda = inst.rate_coeff[static_cast<std::size_t>(j)] * std::log2(1.0 + amp * amp / inst.noise);
    }
  }
  return plan;
}

double plan_objective(const SlotInstance& inst, std::span<const UserPlan> plan) {
  double v = 0.0;
  for (std::size_t j = 0; j < plan.size(); ++j) {
    const double w = inst.psnr[j];
    if (!(w > 0.0)) throw DomainError("PSNR must be positive (log domain)");
    v += plan[j].success_prob * std::log(w + plan[j].lambda) + (1.0 - plan[j].success_prob) * std::log(w);
  }
  return v;
}

IaEvaluator::IaEvaluator(const SlotInstance& inst, solver::Options options) : inst_(&inst), options_(options) {}

double IaEvaluator::group_value(int channel, unsigned mask) {
  const auto key = std::make_pair(channel, mask);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  std::vector<int> members;
  for (int j = 0; j < inst_->users(); ++j) {
    if (mask & (1u << j)) members.push_back(j);
  }
  const auto report = solver::solve(group_problem(*inst_, channel, members), options_);
  double base = 0.0;
  for (int j : members) base += std::log(inst_->psnr[static_cast<std::size_t>(j)]);
  const double v = report.objective - base;
  cache_.emplace(key, v);
  return v;
}

double IaEvaluator::operator()(const ChannelAllocation& b) {
  if (b.users > 31) throw CapacityError("evaluator caches groups as 32-bit user masks");
  double v = 0.0;
  for (int m = 0; m < b.channels; ++m) {
    unsigned mask = 0;
    for (int j = 0; j < b.users; ++j) {
      if (b.at(j, m)) mask |= 1u << j;
    }
    if (mask != 0) v += group_value(m, mask);
  }
  return v;
}

double channel_condition(const SlotInstance& inst, int user, int channel) {
  return inst.h[static_cast<std::size_t>(channel)].col(user).squaredNorm();
}

namespace {

// Maximum-ratio transmission from every node at full power.
double mrt_snr(const SlotInstance& inst, int user, int channel) {
  const double amp = std::sqrt(inst.p_max) * inst.h[static_cast<std::size_t>(channel)].col(user).cwiseAbs().sum();
  return amp * amp / inst.noise;
}

int best_channel(const SlotInstance& inst, int user, std::span<const int> available) {
  int best = -1;
  double best_metric = -1.0;
  for (int m : available) {
    const double metric = channel_condition(inst, user, m);
    if (metric > best_metric) {
      best_metric = metric;
      best = m;
    }
  }
  return best;
}

}  // namespace

std::vector<UserPlan> heuristic1(const SlotInstance& inst, std::span<const int> available) {
  std::vector<UserPlan> plan(static_cast<std::size_t>(inst.users()));
  if (available.empty()) return plan;
  std::vector<int> load(static_cast<std::size_t>(inst.channels()), 0);
  for (int j = 0; j < inst.users(); ++j) {
    const int m = best_channel(inst, j, available);
    plan[static_cast<std::size_t>(j)].channel = m;
    ++load[static_cast<std::size_t>(m)];
  }
  for (int j = 0; j < inst.users(); ++j) {
    auto& u = plan[static_cast<std::size_t>(j)];
    const double share = 1.0 / load[static_cast<std::size_t>(u.channel)];
    u.success_prob = inst.access_prob[static_cast<std::size_t>(u.channel)];
    u.lambda = share * inst.rate_coeff[static_cast<std::size_t>(j)] * std::log2(1.0 + mrt_snr(inst, j, u.channel));
  }
  return plan;
}

std::vector<UserPlan> heuristic2(const SlotInstance& inst, std::span<const int> available) {
  std::vector<UserPlan> plan(static_cast<std::size_t>(inst.users()));
  std::vector<int> channels(available.begin(), available.end());
  std::sort(channels.begin(), channels.end());
  std::vector<bool> served(static_cast<std::size_t>(inst.users()), false);
  for (int m : channels) {
    int best = -1;
    double best_metric = -1.0;
    for (int j = 0; j < inst.users(); ++j) {
      if (served[static_cast<std::size_t>(j)]) continue;
      const double metric = channel_condition(inst, j, m);
      if (metric > best_metric) {
        best_metric = metric;
        best = j;
      }
    }
    if (best < 0) break;
    served[static_cast<std::size_t>(best)] = true;
    auto& u = plan[static_cast<std::size_t>(best)];
    u.channel = m;
    u.success_prob = inst.access_prob[static_cast<std::size_t>(m)];
    u.lambda = inst.rate_coeff[static_cast<std::size_t>(best)] * std::log2(1.0 + mrt_snr(inst, best, m));
  }
  return plan;
}

}  // namespace crlab::allocation
