#pragma once

// Licensed-channel occupancy and fading-gain models.

#include <random>

namespace crlab::channel {

/// Two-state Markov occupancy process for one licensed channel.
///
/// State "idle" is hypothesis H0. `lambda` is P(idle -> idle), `mu` is
/// P(busy -> idle) and `eta` is the long-run busy fraction.
struct MarkovChannelModel {
  double lambda = 0.7;
  double mu = 0.2;
  double eta = 0.6;

  /// Builds a model and derives eta from the stationary law of (lambda, mu).
  /// Throws DomainError for probabilities outside [0,1] and for the
  /// absorbing chain lambda = 1, mu = 0.
  static MarkovChannelModel from_transitions(double lambda, double mu);

  /// Builds a model with the given utilization, holding lambda fixed and
  /// solving for mu. Throws DomainError when no mu in [0,1] exists.
  static MarkovChannelModel from_utilization(double eta, double lambda);

  /// Throws DomainError unless all fields are probabilities.
  void validate() const;
};

/// Long-run probability that the channel is idle: mu / (1 - lambda + mu).
double stationary_idle_prob(const MarkovChannelModel& model);

struct ChannelState {
  bool occupied = false;  ///< true = primary user present (H1)

  friend bool operator==(ChannelState, ChannelState) = default;
};

/// One Markov transition driven by a uniform draw in [0,1).
ChannelState step_channel(ChannelState state, const MarkovChannelModel& model, double draw);

/// Draws the next state with the caller's generator.
template <class Urbg>
ChannelState step_channel(ChannelState state, const MarkovChannelModel& model, Urbg& rng) {
  return step_channel(state, model, std::uniform_real_distribution<double>(0.0, 1.0)(rng));
}

/// Draws a state from the stationary distribution.
template <class Urbg>
ChannelState stationary_state(const MarkovChannelModel& model, Urbg& rng) {
  const double idle = stationary_idle_prob(model);
  return ChannelState{std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= idle};
}

/// Exponentially distributed power gain (Rayleigh amplitude).
struct FadingModel {
  double mean_gain = 1.0;
};

/// P{G > x} = exp(-x / mean_gain). Negative x throws DomainError.
double gain_ccdf(const FadingModel& model, double x);

/// Draws a power gain.
template <class Urbg>
double sample_gain(const FadingModel& model, Urbg& rng) {
  return std::exponential_distribution<double>(1.0 / model.mean_gain)(rng);
}

}  // namespace crlab::channel
