#pragma once

// MGS video quality model and the per-GOP streaming session.

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crlab/allocation.hpp"
#include "crlab/channel.hpp"
#include "crlab/sensing.hpp"
#include "crlab/solver.hpp"

namespace crlab::video {

/// W(R) = alpha + beta * R with R in Mb/s.
struct VideoModel {
  double alpha = 28.0;  ///< dB at zero rate
  double beta = 4.0;    ///< dB per Mb/s
  std::string name;

  /// Throws DomainError unless beta >= 0 and alpha > 0.
  void validate() const;
  double psnr(double rate_mbps) const { return alpha + beta * rate_mbps; }
};

/// Placeholder constants for the three CIF test sequences.
VideoModel bus();
VideoModel mobile();
VideoModel harbor();
/// Case-insensitive lookup of the three names above.
VideoModel video_by_name(std::string_view name);

/// P_j = sum_m b[m] P^D_m for one allocation row. Throws DomainError when
/// the row selects more than one channel.
double success_probability(std::span<const std::uint8_t> b_row, std::span<const double> access_probs);

/// sum_j [P_j log(w_j + lambda_j) + (1 - P_j) log w_j]. Throws DomainError when some w_j <= 0.
double slot_objective(std::span<const double> psnr, std::span<const double> success,
                      std::span<const double> lambda);

struct SessionState {
  std::vector<double> psnr;  ///< w_j^t, dB
  int t = 0;
  int horizon = 10;          ///< GOP deadline T in slots
};

/// One slot: user j gains lambda_j when uniforms[j] < P_j. Throws DomainError
/// once t has reached the horizon.
SessionState advance_slot(const SessionState& state, std::span<const allocation::UserPlan> plan,
                          std::span<const double> uniforms);

enum class Mode { SingleChannel, MultiNoBond, MultiBond };
enum class Scheme { Proposed, Heuristic1, Heuristic2 };

inline constexpr std::array<Scheme, 3> kAllSchemes{Scheme::Proposed, Scheme::Heuristic1, Scheme::Heuristic2};

std::string_view to_string(Mode m);
std::string_view to_string(Scheme s);
/// Accepts "single-channel", "multi-nobond", "multi-bond".
Mode parse_mode(std::string_view name);

struct SessionConfig {
  Mode mode = Mode::SingleChannel;
  int channels = 1;
  int transmitters = 4;
  std::vector<VideoModel> videos;  ///< one per user
  channel::MarkovChannelModel markov = channel::MarkovChannelModel::from_utilization(0.6, 0.7);
  double gamma = 0.2;
  sensing::SensorProfile sensor{0.3, 0.3};
  int sensors_per_channel = 4;
  double availability_cutoff = 0.5;  ///< channel m is in A(t) iff P^A_m > cutoff
  double bandwidth_mhz = 1.0;
  int horizon = 10;
  double p_max = 10.0;
  double noise = 1.0;
  double mean_gain = 1.0;            ///< mean power gain of every transmitter-user link
  std::vector<std::uint64_t> seeds;
  solver::Options solver;     ///< final per-slot weight design
  solver::Options evaluator;  ///< Phi evaluations inside the greedy allocator

  SessionConfig() {
    evaluator.certificate_tol = 1e-5;
    evaluator.gap_tol = 1e-3;
    evaluator.max_iterations = 300;
  }

  /// Throws ConfigError on the first invalid field.
  void validate() const;
  int users() const { return static_cast<int>(videos.size()); }
};

/// Paper scenario with one channel, four transmitters and three users.
SessionConfig single_channel_scenario();
/// Six channels, four transmitters, twelve users, no bonding.
SessionConfig multi_channel_scenario(double eta = 0.6);
/// Six channels with bonding; three users so the bonded group is zero-forcible.
SessionConfig bonded_scenario(double eta = 0.6);

struct TraceRow {
  int t = 0;
  int user = 0;
  int channel = -1;
  double success_prob = 0.0;
  double lambda_db = 0.0;
  double w_db = 0.0;
};

struct SchemeResult {
  Scheme scheme = Scheme::Proposed;
  std::vector<double> seed_mean_psnr;   ///< mean final PSNR over users, per seed
  std::vector<double> user_mean_psnr;   ///< final PSNR per user, averaged over seeds
  double mean_psnr = 0.0;
  std::vector<double> slot_objectives;  ///< every slot of every seed, in order
};

struct SessionResult {
  std::array<SchemeResult, 3> schemes;
  /// Per slot of the first seed: |A(t)| * Phi(greedy), an upper bound on the
  /// optimal allocation's Phi (multi-channel without bonding only).
  std::vector<double> allocation_bound;
  /// Geometric-mean final PSNR implied by those bounds, averaged over seeds
  /// (multi-channel without bonding only, else 0).
  double bound_psnr = 0.0;
  std::vector<TraceRow> trace;  ///< proposed scheme, first seed

  const SchemeResult& at(Scheme s) const { return schemes[static_cast<std::size_t>(s)]; }
};

/// Runs every seed through one GOP with all three schemes on common channel,
/// sensing, gain and success draws.
SessionResult run_gop(const SessionConfig& config);

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows);

}  // namespace crlab::video
