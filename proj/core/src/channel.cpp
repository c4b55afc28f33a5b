#include "crlab/channel.hpp"

#include <cmath>
#include <string>

#include "crlab/error.hpp"

namespace crlab::channel {
namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0,1], got " + std::to_string(p));
  }
}

}  // namespace

MarkovChannelModel MarkovChannelModel::from_transitions(double lambda, double mu) {
  require_probability(lambda, "lambda");
  require_probability(mu, "mu");
  MarkovChannelModel m{lambda, mu, 0.0};
  m.eta = 1.0 - stationary_idle_prob(m);
  return m;
}

MarkovChannelModel MarkovChannelModel::from_utilization(double eta, double lambda) {
  require_probability(lambda, "lambda");
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError("utilization must lie in (0,1], got " + std::to_string(eta));
  }
  // Stationarity: 1 - eta = mu / (1 - lambda + mu).
  const double mu = (1.0 - eta) * (1.0 - lambda) / eta;
  if (mu > 1.0) {
    throw DomainError("no busy->idle probability reaches utilization " + std::to_string(eta) +
                      " with lambda " + std::to_string(lambda));
  }
  return from_transitions(lambda, mu);
}

void MarkovChannelModel::validate() const {
  require_probability(lambda, "lambda");
  require_probability(mu, "mu");
  require_probability(eta, "eta");
}

double stationary_idle_prob(const MarkovChannelModel& model) {
  const double denom = 1.0 - model.lambda + model.mu;
  if (denom <= 0.0) {
    throw DomainError("Markov chain with lambda = 1 and mu = 0 has no unique stationary distribution");
  }
  return model.mu / denom;
}

ChannelState step_channel(ChannelState state, const MarkovChannelModel& model, double draw) {
  const double p_idle_next = state.occupied ? model.mu : model.lambda;
  return ChannelState{!(draw < p_idle_next)};
}

double gain_ccdf(const FadingModel& model, double x) {
  if (x < 0.0 || std::isnan(x)) {
    throw DomainError("gain_ccdf requires x >= 0");
  }
  if (!(model.mean_gain > 0.0)) {
    throw DomainError("fading mean gain must be positive");
  }
  return std::exp(-x / model.mean_gain);
}

}  // namespace crlab::channel
