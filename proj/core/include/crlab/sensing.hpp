#pragma once

// Cooperative spectrum sensing: Bayesian fusion of binary sensor reports,
// the optimal sensing threshold search, and probabilistic channel access.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace crlab::sensing {

/// Error rates of one spectrum sensor.
struct SensorProfile {
  double false_alarm = 0.1;     ///< epsilon = P{reading 1 | H0}
  double miss_detection = 0.1;  ///< delta   = P{reading 0 | H1}

  /// Throws DomainError unless both rates lie in [0,1). Returns false (and
  /// does not throw) for an uninformative sensor with eps + delta >= 1.
  bool validate() const;

  /// P{reading | H0}.
  double likelihood_idle(int reading) const;
  /// P{reading | H1}.
  double likelihood_busy(int reading) const;
};

/// Binary readings, one per sensor; 1 means "sensed busy".
struct SensingOutcome {
  std::vector<std::uint8_t> readings;

  /// Outcome whose readings are the low bits of `bits` (sensor i = bit i).
  static SensingOutcome from_bits(std::uint32_t bits, std::size_t n);
};

/// Posterior probability that the channel is idle given every reading.
double conditional_availability(double eta, std::span<const SensorProfile> profiles,
                                const SensingOutcome& outcome);

/// Folds one more reading into a posterior. Starting from the prior 1 - eta
/// and folding every reading reproduces conditional_availability.
double iterative_availability(double previous, const SensorProfile& profile, int reading);

struct ThresholdEntry {
  double availability = 0.0;
  SensingOutcome outcome;
  double likelihood_idle = 0.0;  ///< product over sensors of P{reading | H0}
  double likelihood_busy = 0.0;  ///< product over sensors of P{reading | H1}
};

/// Every sensing outcome with its availability, sorted non-increasing.
struct ThresholdTable {
  std::vector<ThresholdEntry> entries;
  double eta = 0.5;  ///< prior busy probability the table was built with
};

inline constexpr std::size_t kMaxEnumeratedSensors = 20;

/// Enumerates all 2^N outcomes. Throws CapacityError above 20 sensors.
ThresholdTable enumerate_thresholds(double eta, std::span<const SensorProfile> profiles);

/// Result of the threshold search. Access happens iff availability > tau_star.
struct ThresholdDecision {
  double tau_star = 0.0;
  std::size_t optimal_index = 0;  ///< first rejected entry; entries.size() when all are admitted
  double collision_prob = 0.0;    ///< P{D = 0 | H1}
  double detection_prob = 0.0;    ///< P{D = 0 | H0}
};

/// Relative tolerance under which two availability values form one tie block.
inline constexpr double kTieTolerance = 1e-12;

/// Largest admitted prefix of the sorted table whose miss-collision mass
/// stays within gamma. Equal availability values are admitted as one block.
/// When every entry fits, tau_star is -infinity (always access). A table
/// built for a channel that is never busy (eta = 0) admits everything.
ThresholdDecision optimal_threshold(const ThresholdTable& table, double gamma);

/// Convenience: enumerate and search in one call.
ThresholdDecision optimal_threshold(double eta, std::span<const SensorProfile> profiles, double gamma);

/// P^D = min(gamma / (1 - P^A), 1).
double access_probability(double availability, double gamma);

/// Draws one reading for a sensor observing a channel in the given state.
template <class Urbg>
int draw_reading(const SensorProfile& profile, bool occupied, Urbg& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (occupied) return u < profile.miss_detection ? 0 : 1;
  return u < profile.false_alarm ? 1 : 0;
}

}  // namespace crlab::sensing
