#include "crlab/video.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <random>
#include <string>

#include "crlab/error.hpp"
#include "crlab/parallel.hpp"

namespace crlab::video {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct SeedOutcome {
  std::array<std::vector<double>, 3> final_psnr;
  std::array<std::vector<double>, 3> slot_objectives;
  std::vector<double> bound;
  std::vector<TraceRow> trace;
};

allocation::SlotInstance make_instance(const SessionConfig& cfg, const std::vector<ia::GainMatrix>& h,
                                       const std::vector<double>& access, const std::vector<double>& psnr) {
  allocation::SlotInstance inst;
  inst.h = h;
  inst.access_prob = access;
  inst.psnr = psnr;
  for (const auto& v : cfg.videos) inst.rate_coeff.push_back(v.beta * cfg.bandwidth_mhz / cfg.horizon);
  inst.p_max = cfg.p_max;
  inst.noise = cfg.noise;
  return inst;
}

// The available channels as one aggregate channel: summed gains, and a slot
// succeeds unless every bonded channel fails.
allocation::SlotInstance bonded_instance(const allocation::SlotInstance& inst, const std::vector<int>& available) {
  allocation::SlotInstance merged = inst;
  double miss = 1.0;
  for (int m : available) miss *= 1.0 - inst.access_prob[static_cast<std::size_t>(m)];
  merged.h = {ia::bonded_gain(inst.h, available)};
  merged.access_prob = {1.0 - miss};
  return merged;
}

std::vector<allocation::UserPlan> on_bonded(std::vector<allocation::UserPlan> plan, const std::vector<int>& available) {
  for (auto& u : plan) {
    if (u.channel >= 0) u.channel = available.front();
  }
  return plan;
}

std::vector<allocation::UserPlan> proposed_plan(const SessionConfig& cfg, const allocation::SlotInstance& inst,
                                                const std::vector<int>& available, double* bound) {
  const int n = inst.users();
  std::vector<allocation::UserPlan> plan(static_cast<std::size_t>(n));
  if (available.empty()) return plan;
  switch (cfg.mode) {
    case Mode::SingleChannel: {
      ChannelAllocation b(n, inst.channels(), available);
      for (int j = 0; j < n; ++j) b.set(j, available.front(), true);
      return allocation::ia_plan(inst, b, cfg.solver);
    }
    case Mode::MultiNoBond: {
      allocation::IaEvaluator phi(inst, cfg.evaluator);
      const auto greedy = allocation::greedy_select(n, inst.channels(), available, inst.transmitters(),
                                                    [&](const ChannelAllocation& b) { return phi(b); });
      if (bound) *bound = static_cast<double>(available.size()) * greedy.objective;
      return allocation::ia_plan(inst, greedy.allocation, cfg.solver);
    }
    case Mode::MultiBond: {
      const auto merged = bonded_instance(inst, available);
      const std::vector<int> only{0};
      ChannelAllocation b(n, 1, only);
      for (int j = 0; j < n; ++j) b.set(j, 0, true);
      return on_bonded(allocation::ia_plan(merged, b, cfg.solver), available);
    }
  }
  return plan;
}

SeedOutcome run_seed(const SessionConfig& cfg, std::uint64_t seed, bool keep_trace) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x71deu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const channel::FadingModel fading{cfg.mean_gain};
  const int n = cfg.users();
  const int k = cfg.transmitters;
  const int mch = cfg.channels;

  std::vector<channel::ChannelState> state(static_cast<std::size_t>(mch));
  for (auto& s : state) s = channel::stationary_state(cfg.markov, rng);

  SeedOutcome out;
  std::array<SessionState, 3> sessions;
  for (auto& s : sessions) {
    for (const auto& v : cfg.videos) s.psnr.push_back(v.alpha);
    s.horizon = cfg.horizon;
  }

  for (int t = 0; t < cfg.horizon; ++t) {
    std::vector<double> access(static_cast<std::size_t>(mch), 0.0);
    std::vector<int> available;
    for (int m = 0; m < mch; ++m) {
      auto& st = state[static_cast<std::size_t>(m)];
      if (t > 0) st = channel::step_channel(st, cfg.markov, rng);
      double a = 1.0 - cfg.markov.eta;
      for (int l = 0; l < cfg.sensors_per_channel; ++l) {
        a = sensing::iterative_availability(a, cfg.sensor, sensing::draw_reading(cfg.sensor, st.occupied, rng));
      }
      access[static_cast<std::size_t>(m)] = sensing::access_probability(a, cfg.gamma);
      if (a > cfg.availability_cutoff) available.push_back(m);
    }
    std::vector<ia::GainMatrix> h(static_cast<std::size_t>(mch), ia::GainMatrix(k, n));
    for (auto& hm : h) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < k; ++i) hm(i, j) = std::sqrt(channel::sample_gain(fading, rng));
      }
    }
    std::vector<double> draws(static_cast<std::size_t>(n));
    for (auto& u : draws) u = uniform(rng);

    for (Scheme scheme : kAllSchemes) {
      auto& session = sessions[static_cast<std::size_t>(scheme)];
      const auto inst = make_instance(cfg, h, access, session.psnr);
      std::vector<allocation::UserPlan> plan;
      double bound = 0.0;
      switch (scheme) {
        case Scheme::Proposed: plan = proposed_plan(cfg, inst, available, &bound); break;
        case Scheme::Heuristic1:
        case Scheme::Heuristic2: {
          if (cfg.mode == Mode::MultiBond && !available.empty()) {
            const auto merged = bonded_instance(inst, available);
            const std::vector<int> only{0};
            plan = on_bonded(scheme == Scheme::Heuristic1 ? allocation::heuristic1(merged, only)
                                                          : allocation::heuristic2(merged, only),
                             available);
          } else {
            plan = scheme == Scheme::Heuristic1 ? allocation::heuristic1(inst, available)
                                                : allocation::heuristic2(inst, available);
          }
          break;
        }
      }
      std::vector<double> p, lambda;
      for (const auto& u : plan) {
        p.push_back(u.success_prob);
        lambda.push_back(u.lambda);
      }
      out.slot_objectives[static_cast<std::size_t>(scheme)].push_back(slot_objective(session.psnr, p, lambda));
      if (scheme == Scheme::Proposed) out.bound.push_back(bound);
      session = advance_slot(session, plan, draws);
      if (keep_trace && scheme == Scheme::Proposed) {
        for (int j = 0; j < n; ++j) {
          const auto& u = plan[static_cast<std::size_t>(j)];
          out.trace.push_back({t, j, u.channel, u.success_prob, u.lambda, session.psnr[static_cast<std::size_t>(j)]});
        }
      }
    }
  }
  for (std::size_t s = 0; s < 3; ++s) out.final_psnr[s] = sessions[s].psnr;
  return out;
}

}  // namespace

void VideoModel::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("video alpha must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("video beta must be non-negative");
}

// Rate-distortion constants are not printed for these sequences; the values
// below are placeholders of a plausible CIF magnitude.
VideoModel bus() { return {28.2, 4.5, "bus"}; }
VideoModel mobile() { return {25.6, 3.9, "mobile"}; }
VideoModel harbor() { return {27.3, 4.1, "harbor"}; }

VideoModel video_by_name(std::string_view name) {
  const auto n = lower(name);
  if (n == "bus") return bus();
  if (n == "mobile") return mobile();
  if (n == "harbor") return harbor();
  throw DomainError("unknown video sequence '" + std::string(name) + "'");
}

double success_probability(std::span<const std::uint8_t> b_row, std::span<const double> access_probs) {
  if (b_row.size() != access_probs.size()) throw DomainError("allocation row and access probabilities differ in length");
  double p = 0.0;
  int count = 0;
  for (std::size_t m = 0; m < b_row.size(); ++m) {
    if (b_row[m] == 0) continue;
    ++count;
    p += access_probs[m];
  }
  if (count > 1) throw DomainError("a user can receive from one channel only");
  return p;
}

double slot_objective(std::span<const double> psnr, std::span<const double> success,
                      std::span<const double> lambda) {
  if (psnr.size() != success.size() || psnr.size() != lambda.size()) throw DomainError("per-user inputs differ in length");
  double v = 0.0;
  for (std::size_t j = 0; j < psnr.size(); ++j) {
    if (!(psnr[j] > 0.0)) throw DomainError("PSNR must be positive (log domain)");
    v += success[j] * std::log(psnr[j] + lambda[j]) + (1.0 - success[j]) * std::log(psnr[j]);
  }
  return v;
}

SessionState advance_slot(const SessionState& state, std::span<const allocation::UserPlan> plan,
                          std::span<const double> uniforms) {
  if (state.t >= state.horizon) throw DomainError("session already reached its deadline");
  if (plan.size() != state.psnr.size() || uniforms.size() != state.psnr.size()) {
    throw DomainError("plan and draws must cover every user");
  }
  SessionState next = state;
  for (std::size_t j = 0; j < plan.size(); ++j) {
    if (uniforms[j] < plan[j].success_prob) next.psnr[j] += plan[j].lambda;
  }
  ++next.t;
  return next;
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::SingleChannel: return "single-channel";
    case Mode::MultiNoBond: return "multi-nobond";
    case Mode::MultiBond: return "multi-bond";
  }
  return "?";
}

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Proposed: return "proposed";
    case Scheme::Heuristic1: return "heuristic1";
    case Scheme::Heuristic2: return "heuristic2";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  const auto n = lower(name);
  if (n == "single-channel" || n == "single") return Mode::SingleChannel;
  if (n == "multi-nobond") return Mode::MultiNoBond;
  if (n == "multi-bond") return Mode::MultiBond;
  throw DomainError("unknown scenario '" + std::string(name) + "'");
}

void SessionConfig::validate() const {
  if (channels < 1) throw ConfigError("channels must be >= 1");
  if (mode == Mode::SingleChannel && channels != 1) throw ConfigError("single-channel scenario needs channels = 1");
  if (transmitters < 1) throw ConfigError("transmitters must be >= 1");
  if (videos.empty()) throw ConfigError("at least one user (video) is required");
  for (const auto& v : videos) {
    try {
      v.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("video ") + v.name + ": " + e.what());
    }
  }
  if (mode != Mode::MultiNoBond && users() > transmitters) {
    throw ConfigError("zero-forcing needs users <= transmitters in this scenario");
  }
  if (users() > 31) throw ConfigError("at most 31 users are supported");
  try {
    markov.validate();
    sensor.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0,1]");
  if (sensors_per_channel < 1) throw ConfigError("sensors_per_channel must be >= 1");
  if (!(availability_cutoff >= 0.0 && availability_cutoff < 1.0)) throw ConfigError("availability_cutoff must lie in [0,1)");
  if (!(bandwidth_mhz > 0.0)) throw ConfigError("bandwidth must be positive");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(p_max > 0.0)) throw ConfigError("p_max must be positive");
  if (!(noise > 0.0)) throw ConfigError("noise must be positive");
  if (!(mean_gain > 0.0)) throw ConfigError("mean_gain must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
}

SessionConfig single_channel_scenario() {
  SessionConfig c;
  c.mode = Mode::SingleChannel;
  c.channels = 1;
  c.transmitters = 4;
  c.videos = {bus(), mobile(), harbor()};
  c.markov = channel::MarkovChannelModel::from_utilization(0.6, 0.7);
  c.gamma = 0.2;
  c.sensor = {0.3, 0.3};
  c.sensors_per_channel = 4;
  c.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return c;
}

SessionConfig multi_channel_scenario(double eta) {
  SessionConfig c = single_channel_scenario();
  c.mode = Mode::MultiNoBond;
  c.channels = 6;
  c.markov = channel::MarkovChannelModel::from_utilization(eta, 0.7);
  c.videos.clear();
  for (int i = 0; i < 4; ++i) {
    c.videos.push_back(bus());
    c.videos.push_back(mobile());
    c.videos.push_back(harbor());
  }
  return c;
}

SessionConfig bonded_scenario(double eta) {
  SessionConfig c = single_channel_scenario();
  c.mode = Mode::MultiBond;
  c.channels = 6;
  c.markov = channel::MarkovChannelModel::from_utilization(eta, 0.7);
  return c;
}

SessionResult run_gop(const SessionConfig& config) {
  config.validate();
  std::vector<SeedOutcome> seeds(config.seeds.size());
  parallel_for(config.seeds.size(), [&](std::size_t i) { seeds[i] = run_seed(config, config.seeds[i], i == 0); });

  SessionResult result;
  const std::size_t n = static_cast<std::size_t>(config.users());
  for (Scheme scheme : kAllSchemes) {
    const std::size_t s = static_cast<std::size_t>(scheme);
    auto& r = result.schemes[s];
    r.scheme = scheme;
    r.user_mean_psnr.assign(n, 0.0);
    for (const auto& seed : seeds) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        sum += seed.final_psnr[s][j];
        r.user_mean_psnr[j] += seed.final_psnr[s][j] / static_cast<double>(seeds.size());
      }
      r.seed_mean_psnr.push_back(sum / static_cast<double>(n));
      r.slot_objectives.insert(r.slot_objectives.end(), seed.slot_objectives[s].begin(),
                               seed.slot_objectives[s].end());
    }
    double total = 0.0;
    for (double v : r.seed_mean_psnr) total += v;
    r.mean_psnr = total / static_cast<double>(r.seed_mean_psnr.size());
  }
  if (!seeds.empty()) {
    if (config.mode == Mode::MultiNoBond) {
      result.allocation_bound = seeds.front().bound;
      // Sum of log-PSNR gains over the GOP telescopes, so the per-slot bounds
      // cap the optimal allocation's final sum of log PSNR.
      double log_start = 0.0;
      for (const auto& v : config.videos) log_start += std::log(v.alpha);
      double total = 0.0;
      for (const auto& seed : seeds) {
        double gain = 0.0;
        for (double b : seed.bound) gain += b;
        total += std::exp((log_start + gain) / static_cast<double>(n));
      }
      result.bound_psnr = total / static_cast<double>(seeds.size());
    }
    result.trace = std::move(seeds.front().trace);
  }
  return result;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows) {
  os << "t,user,channel,P_success,lambda_dB,w_dB\n";
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.t << ',' << r.user << ',' << r.channel << ',' << r.success_prob << ',' << r.lambda_db << ','
       << r.w_db << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

}  // namespace crlab::video
