#include "crlab/access.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "crlab/error.hpp"

namespace crlab::access {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::DF: return "DF";
    case Strategy::AF: return "AF";
    case Strategy::DL: return "DL";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "DF") return Strategy::DF;
  if (upper == "AF") return Strategy::AF;
  if (upper == "DL") return Strategy::DL;
  throw DomainError("unknown relay strategy '" + std::string(name) + "'");
}

int frames_delivered(Strategy s, int odd_count, int even_count) {
  switch (s) {
    case Strategy::DF: return std::min(odd_count, even_count);
    case Strategy::AF: return odd_count / 2 + even_count / 2;
    case Strategy::DL: return odd_count + even_count;
  }
  return 0;
}

ContentionOutcome csma_probs(int n_links) {
  if (n_links < 1) throw DomainError("csma_probs needs at least one link");
  const double n = n_links;
  const double q = 1.0 - 1.0 / n;
  ContentionOutcome c;
  c.p0 = std::pow(q, n);
  c.p1 = std::pow(q, n - 1.0);
  c.p2 = std::max(0.0, 1.0 - c.p0 - c.p1);
  return c;
}

double adjusted_tolerance(double gamma, double p1) {
  if (!(p1 > 0.0)) throw DomainError("adjusted tolerance undefined: contention is never won (P1 = 0)");
  return std::min(gamma / p1, 1.0);
}

std::vector<ChannelDecisions> channel_decisions(std::span<const channel::MarkovChannelModel> models,
                                                const SensingConfig& config) {
  const std::size_t m = config.sensors.size();
  if (models.size() != 1 && models.size() != m) {
    throw DomainError("need one Markov model or one per channel");
  }
  const double gamma_odd = adjusted_tolerance(config.gamma, config.p1);
  std::vector<ChannelDecisions> out;
  out.reserve(m);
  for (std::size_t c = 0; c < m; ++c) {
    const auto& model = models.size() == 1 ? models[0] : models[c];
    const auto table = sensing::enumerate_thresholds(model.eta, config.sensors[c]);
    out.push_back({sensing::optimal_threshold(table, gamma_odd), sensing::optimal_threshold(table, config.gamma)});
  }
  return out;
}

SlotPairDistribution slot_pair_distribution(std::span<const channel::MarkovChannelModel> models,
                                            const SensingConfig& config) {
  const auto decisions = channel_decisions(models, config);
  SlotPairDistribution dist;
  dist.channels.resize(decisions.size());
  for (std::size_t c = 0; c < decisions.size(); ++c) {
    const auto& model = models.size() == 1 ? models[0] : models[c];
    const double idle = channel::stationary_idle_prob(model);
    // P{D = 0 | S}: detection under H0, collision under H1.
    const double access_odd[2] = {decisions[c].odd.detection_prob, decisions[c].odd.collision_prob};
    const double access_even[2] = {decisions[c].even.detection_prob, decisions[c].even.collision_prob};
    auto& law = dist.channels[c];
    for (int s_od = 0; s_od < 2; ++s_od) {
      const double p_s_od = s_od == 0 ? idle : 1.0 - idle;
      const double p_idle_next = s_od == 0 ? model.lambda : model.mu;
      for (int s_ev = 0; s_ev < 2; ++s_ev) {
        const double p_trans = s_ev == 0 ? p_idle_next : 1.0 - p_idle_next;
        for (int d_od = 0; d_od < 2; ++d_od) {
          const double p_d_od = d_od == 0 ? access_odd[s_od] : 1.0 - access_odd[s_od];
          for (int d_ev = 0; d_ev < 2; ++d_ev) {
            const double p_d_ev = d_ev == 0 ? access_even[s_ev] : 1.0 - access_even[s_ev];
            law[SlotPairDistribution::index(d_od, s_od, d_ev, s_ev)] = p_d_ev * p_d_od * p_trans * p_s_od;
          }
        }
      }
    }
  }
  return dist;
}

SlotPairDistribution slot_pair_distribution(const channel::MarkovChannelModel& model,
                                            const SensingConfig& config) {
  return slot_pair_distribution(std::span<const channel::MarkovChannelModel>(&model, 1), config);
}

std::vector<double> count_distribution(const SlotPairDistribution& dist) {
  const std::size_t m = dist.channels.size();
  if (m > kMaxExactChannels) {
    throw CapacityError("exact frame expectation supports at most " + std::to_string(kMaxExactChannels) +
                        " channels, got " + std::to_string(m));
  }
  const std::size_t w = m + 1;
  std::vector<double> pmf(w * w, 0.0);
  std::vector<double> next(w * w, 0.0);
  pmf[0] = 1.0;
  for (std::size_t c = 0; c < m; ++c) {
    const auto& law = dist.channels[c];
    // Indicator pair (odd usable, even usable): usable means idle and accessed.
    const double both = law[SlotPairDistribution::index(0, 0, 0, 0)];
    const double odd_only = law[SlotPairDistribution::index(0, 0, 0, 1)] +
                            law[SlotPairDistribution::index(0, 0, 1, 0)] +
                            law[SlotPairDistribution::index(0, 0, 1, 1)];
    const double even_only = law[SlotPairDistribution::index(0, 1, 0, 0)] +
                             law[SlotPairDistribution::index(1, 0, 0, 0)] +
                             law[SlotPairDistribution::index(1, 1, 0, 0)];
    const double neither = std::max(0.0, 1.0 - both - odd_only - even_only);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t x = 0; x <= c; ++x) {
      for (std::size_t y = 0; y <= c; ++y) {
        const double p = pmf[x * w + y];
        if (p == 0.0) continue;
        next[x * w + y] += p * neither;
        next[(x + 1) * w + y] += p * odd_only;
        next[x * w + y + 1] += p * even_only;
        next[(x + 1) * w + y + 1] += p * both;
      }
    }
    pmf.swap(next);
  }
  return pmf;
}

double expected_frames(const SlotPairDistribution& dist, Strategy strategy) {
  const auto pmf = count_distribution(dist);
  const std::size_t w = dist.channels.size() + 1;
  double e = 0.0;
  for (std::size_t x = 0; x < w; ++x) {
    for (std::size_t y = 0; y < w; ++y) {
      e += pmf[x * w + y] * frames_delivered(strategy, static_cast<int>(x), static_cast<int>(y));
    }
  }
  return e;
}

double capacity(double expected_frames, std::span<const double> decode_rates, double p1,
                double packet_bits, double slot_seconds, int n_links) {
  if (n_links < 1) throw DomainError("capacity needs at least one link");
  if (decode_rates.size() != static_cast<std::size_t>(n_links)) {
    throw DomainError("capacity needs one decode rate per link");
  }
  if (!(slot_seconds > 0.0)) throw DomainError("slot duration must be positive");
  double sum = 0.0;
  for (double p : decode_rates) sum += p * p1 * packet_bits;
  return expected_frames * sum / (2.0 * n_links * slot_seconds);
}

}  // namespace crlab::access
