#pragma once

// p-persistent CSMA contention, tolerance adjustment, and exact network
// capacity of the DF / AF / DL relay strategies.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "crlab/channel.hpp"
#include "crlab/sensing.hpp"

namespace crlab::access {

enum class Strategy { DF, AF, DL };

inline constexpr std::array<Strategy, 3> kAllStrategies{Strategy::DF, Strategy::AF, Strategy::DL};

std::string_view to_string(Strategy s);
/// Accepts "DF", "AF", "DL" in any case. Throws DomainError otherwise.
Strategy parse_strategy(std::string_view name);

/// Frames delivered in one slot pair given the odd-slot and even-slot counts
/// of channels that are idle and accessed.
int frames_delivered(Strategy s, int odd_count, int even_count);

/// Probabilities of the three RTS cases: nobody, exactly one, collision.
struct ContentionOutcome {
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

/// RTS probability 1/N for each of N links.
ContentionOutcome csma_probs(int n_links);

/// gamma / P1 clamped to 1. Throws DomainError when p1 <= 0.
double adjusted_tolerance(double gamma, double p1);

/// Sensing setup shared by the analysis and the simulator.
struct SensingConfig {
  std::vector<std::vector<sensing::SensorProfile>> sensors;  ///< one list per channel
  double gamma = 0.08;                                       ///< even-slot tolerance
  double p1 = 1.0;                                           ///< contention win probability (odd slots use gamma/p1)
};

/// Access-decision rates of one channel in odd and even slots.
struct ChannelDecisions {
  sensing::ThresholdDecision odd;
  sensing::ThresholdDecision even;
};

std::vector<ChannelDecisions> channel_decisions(std::span<const channel::MarkovChannelModel> models,
                                                const SensingConfig& config);

/// Joint law of (D_od, S_od, D_ev, S_ev) per channel; 0 means "access" for D
/// and "idle" for S.
struct SlotPairDistribution {
  std::vector<std::array<double, 16>> channels;

  static constexpr std::size_t index(int d_od, int s_od, int d_ev, int s_ev) {
    return static_cast<std::size_t>(d_od * 8 + s_od * 4 + d_ev * 2 + s_ev);
  }
};

/// One model per channel; a single model is applied to every channel.
SlotPairDistribution slot_pair_distribution(std::span<const channel::MarkovChannelModel> models,
                                            const SensingConfig& config);
SlotPairDistribution slot_pair_distribution(const channel::MarkovChannelModel& model,
                                            const SensingConfig& config);

inline constexpr std::size_t kMaxExactChannels = 30;

/// Joint pmf of (odd count, even count) of idle-and-accessed channels,
/// row-major (M+1) x (M+1). Throws CapacityError above 30 channels.
std::vector<double> count_distribution(const SlotPairDistribution& dist);

/// Exact E[N] for the strategy, by convolution of per-channel joint indicators.
double expected_frames(const SlotPairDistribution& dist, Strategy strategy);

/// E[N] * sum_k(P^k * P1 * L) / (2 * N * T_s), in bit/s.
double capacity(double expected_frames, std::span<const double> decode_rates, double p1,
                double packet_bits, double slot_seconds, int n_links);

}  // namespace crlab::access
