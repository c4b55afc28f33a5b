#include "crlab/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crlab/error.hpp"
#include "crlab/log.hpp"

namespace crlab::sensing {
namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0,1], got " + std::to_string(p));
  }
}

void require_reading(int reading) {
  if (reading != 0 && reading != 1) throw DomainError("sensor readings must be 0 or 1");
}

}  // namespace

bool SensorProfile::validate() const {
  if (!(false_alarm >= 0.0 && false_alarm < 1.0) || !(miss_detection >= 0.0 && miss_detection < 1.0)) {
    throw DomainError("sensor error rates must lie in [0,1)");
  }
  if (false_alarm + miss_detection >= 1.0) {
    warn("uninformative sensor: false_alarm + miss_detection >= 1");
    return false;
  }
  return true;
}

double SensorProfile::likelihood_idle(int reading) const {
  return reading != 0 ? false_alarm : 1.0 - false_alarm;
}

double SensorProfile::likelihood_busy(int reading) const {
  return reading != 0 ? 1.0 - miss_detection : miss_detection;
}

SensingOutcome SensingOutcome::from_bits(std::uint32_t bits, std::size_t n) {
  SensingOutcome out;
  out.readings.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.readings[i] = static_cast<std::uint8_t>((bits >> i) & 1u);
  return out;
}

double conditional_availability(double eta, std::span<const SensorProfile> profiles,
                                const SensingOutcome& outcome) {
  require_probability(eta, "eta");
  if (outcome.readings.empty()) throw DomainError("sensing outcome must hold at least one reading");
  if (outcome.readings.size() != profiles.size()) {
    throw DomainError("sensing outcome has " + std::to_string(outcome.readings.size()) +
                      " readings for " + std::to_string(profiles.size()) + " sensors");
  }
  if (eta >= 1.0) return 0.0;
  if (eta <= 0.0) return 1.0;

  double idle = 1.0 - eta;
  double busy = eta;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const int r = outcome.readings[i];
    require_reading(r);
    idle *= profiles[i].likelihood_idle(r);
    busy *= profiles[i].likelihood_busy(r);
  }
  const double total = idle + busy;
  // Zero-probability outcome under both hypotheses (conflicting perfect sensors).
  if (total <= 0.0) return 1.0 - eta;
  return idle / total;
}

double iterative_availability(double previous, const SensorProfile& profile, int reading) {
  require_probability(previous, "previous availability");
  require_reading(reading);
  if (previous <= 0.0) return 0.0;
  const double idle = previous * profile.likelihood_idle(reading);
  const double busy = (1.0 - previous) * profile.likelihood_busy(reading);
  const double total = idle + busy;
  if (total <= 0.0) return previous;
  return idle / total;
}

ThresholdTable enumerate_thresholds(double eta, std::span<const SensorProfile> profiles) {
  const std::size_t n = profiles.size();
  if (n == 0) throw DomainError("at least one sensor is required");
  if (n > kMaxEnumeratedSensors) {
    throw CapacityError("threshold enumeration supports at most " + std::to_string(kMaxEnumeratedSensors) +
                        " sensors, got " + std::to_string(n));
  }
  const std::uint32_t count = 1u << n;
  ThresholdTable table;
  table.eta = eta;
  table.entries.reserve(count);
  for (std::uint32_t bits = 0; bits < count; ++bits) {
    ThresholdEntry e;
    e.outcome = SensingOutcome::from_bits(bits, n);
    e.availability = conditional_availability(eta, profiles, e.outcome);
    e.likelihood_idle = 1.0;
    e.likelihood_busy = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      e.likelihood_idle *= profiles[i].likelihood_idle(e.outcome.readings[i]);
      e.likelihood_busy *= profiles[i].likelihood_busy(e.outcome.readings[i]);
    }
    table.entries.push_back(std::move(e));
  }
  std::stable_sort(table.entries.begin(), table.entries.end(),
                   [](const ThresholdEntry& a, const ThresholdEntry& b) { return a.availability > b.availability; });
  return table;
}

ThresholdDecision optimal_threshold(const ThresholdTable& table, double gamma) {
  const auto& entries = table.entries;
  ThresholdDecision d;
  if (entries.empty()) throw DomainError("empty threshold table");

  std::size_t j = 0;
  while (j < entries.size()) {
    // Block of ties starting at j.
    const double head = entries[j].availability;
    std::size_t end = j + 1;
    double block_busy = entries[j].likelihood_busy;
    double block_idle = entries[j].likelihood_idle;
    while (end < entries.size() &&
           std::abs(entries[end].availability - head) <= kTieTolerance * std::max(1.0, std::abs(head))) {
      block_busy += entries[end].likelihood_busy;
      block_idle += entries[end].likelihood_idle;
      ++end;
    }
    if (gamma < 1.0 && table.eta > 0.0 && d.collision_prob + block_busy > gamma) break;
    d.collision_prob += block_busy;
    d.detection_prob += block_idle;
    j = end;
  }
  d.optimal_index = j;
  d.tau_star = j < entries.size() ? entries[j].availability : -std::numeric_limits<double>::infinity();
  // Mass sums may drift a few ulps above 1 when everything is admitted.
  d.collision_prob = std::min(d.collision_prob, 1.0);
  d.detection_prob = std::min(d.detection_prob, 1.0);
  return d;
}

ThresholdDecision optimal_threshold(double eta, std::span<const SensorProfile> profiles, double gamma) {
  return optimal_threshold(enumerate_thresholds(eta, profiles), gamma);
}

double access_probability(double availability, double gamma) {
  require_probability(availability, "availability");
  if (availability >= 1.0) return 1.0;
  return std::min(gamma / (1.0 - availability), 1.0);
}

}  // namespace crlab::sensing
