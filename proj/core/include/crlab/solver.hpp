#pragma once

// Distributed primal-dual solver for the single-channel and channel-bonding
// weight design, with convergence diagnostics.

#include <Eigen/Dense>
#include <ostream>
#include <span>
#include <vector>

#include "crlab/ia.hpp"

namespace crlab::solver {

/// Per-user terms of the expected log-PSNR objective.
struct UserTerm {
  double psnr = 30.0;          ///< current PSNR w_j, dB
  double success_prob = 1.0;   ///< P_j
  double rate_coeff = 1.0;     ///< beta_j * B / T
};

struct Problem {
  ia::GainMatrix gains;  ///< K x N
  std::vector<UserTerm> users;
  double p_max = 10.0;
  double noise = 1.0;

  /// Throws DomainError on shape mismatch or out-of-range values.
  void validate() const;
};

struct Options {
  double step = 1e-2;             ///< initial primal step phi
  double kappa_conv = 1e-6;       ///< stop when ||mu(tau) - mu(tau-1)|| <= kappa_conv ...
  double gap_tol = 1e-6;          ///< ... and the relative duality gap is below this,
  double certificate_tol = 1e-9;  ///< or when best dual and best primal agree to this
  int max_iterations = 10000;
  int inner_max_iterations = 100000;
  double inner_tol = 1e-8;
  double mu0 = 1e-3;              ///< initial value of every dual variable
};

/// One user's subproblem data.
struct Subproblem {
  double psnr = 30.0;
  double success_prob = 1.0;
  double rate_coeff = 1.0;
  double snr_gain = 1.0;  ///< (e_r^T G_j)^2 / noise
  Eigen::MatrixXd e;      ///< K x r basis
};

Subproblem make_subproblem(const Problem& p, const ia::NullSpaceBasis& basis, int user);

/// f_j(c) = P log(w + lambda(c_r)) + (1 - P) log w.
double expected_log_psnr(const Subproblem& s, double c_last);

/// L_j(c, mu) = f_j(c) - sum_k mu_k (e(k) c)^2.
double lagrangian(const Subproblem& s, const Eigen::VectorXd& c, const Eigen::VectorXd& mu);

/// Gradient of L_j with respect to c.
Eigen::VectorXd lagrangian_gradient(const Subproblem& s, const Eigen::VectorXd& c, const Eigen::VectorXd& mu);

/// False when mu leaves the user's signal direction without any power penalty.
bool subproblem_bounded(const Subproblem& s, const Eigen::VectorXd& mu);

struct LocalResult {
  Eigen::VectorXd c;
  double value = 0.0;
  int iterations = 0;
  double step = 0.0;       ///< adapted step, reused as the next warm start
  bool hit_cap = false;
  bool unbounded = false;  ///< no power penalty on this user's direction
};

/// Maximizes L_j(., mu). The shared-prefix coefficients are set to their
/// penalty-minimizing values for the current signal coefficient, and the
/// signal power x = c_r^2 follows a projected gradient ascent with adaptive
/// step (halved on regression, grown 1.5x on success). Throws NumericError
/// on a non-finite gradient.
LocalResult local_subproblem(const Subproblem& s, const Eigen::VectorXd& mu, double c_last_start, double step,
                             const Options& options);

struct DualState {
  Eigen::VectorXd mu;
  int tau = 0;
  std::vector<double> q_history;
};

/// g_k = P_max - sum_j (e_j(k) c_j)^2.
Eigen::VectorXd dual_gradient(std::span<const Subproblem> subs, std::span<const Eigen::VectorXd> c, double p_max);

struct DualStep {
  DualState state;
  bool converged = false;  ///< zero effective gradient: nothing left to move
  double step_norm = 0.0;  ///< ||mu(tau+1) - mu(tau)||
};

/// mu <- [mu - rho g]^+ with rho = (q - q_hat) / ||g~||^2, where g~ drops the
/// components already pinned at zero by the projection.
DualStep dual_update(const DualState& state, const Eigen::VectorXd& gradient, double q_dual, double q_hat);

struct TraceRow {
  int tau = 0;
  double q_dual = 0.0;
  double q_primal = 0.0;
  double gap = 0.0;
  double mu_norm = 0.0;
};

struct SolveReport {
  Eigen::MatrixXd weights;  ///< K x N
  std::vector<Eigen::VectorXd> coefficients;
  double objective = 0.0;   ///< sum_j f_j at the returned weights
  double dual_objective = 0.0;
  int iterations = 0;
  double final_step = 0.0;  ///< ||mu(tau) - mu(tau-1)||
  bool converged = false;
  Eigen::VectorXd mu;
  std::vector<double> q_dual;  ///< q(mu(tau)), tau = 1..iterations
  std::vector<TraceRow> trace;

  double relative_gap() const;
  /// max_k sum_j a(k,j)^2
  double max_node_power() const;
};

/// Solves with the given bases (compute_bases when empty). Non-convergence
/// within max_iterations is reported, not thrown.
SolveReport solve(const Problem& problem, const Options& options = {},
                  std::span<const ia::NullSpaceBasis> bases = {});

/// Fixed K=4, N=3 instance used for the convergence-rate diagnostics: the
/// three CIF sequences at their base PSNR, P_j = 0.8, B = 1 MHz, T = 10,
/// P_max = 10, unit noise and one draw of Rayleigh amplitudes.
Problem reference_problem();

/// Channel bonding: the same solver on the summed gains of the available channels.
SolveReport solve_bonded(std::span<const ia::GainMatrix> h, std::span<const int> available,
                         const std::vector<UserTerm>& users, double p_max, double noise,
                         const Options& options = {});

void write_trace_csv(std::ostream& os, const SolveReport& report);

struct Diagnostics {
  std::vector<double> squared_gap_partial_sums;
  std::vector<double> sqrt_tau_gap;
  double plateau_increase = 0.0;  ///< partial-sum growth over the final tenth of iterations
  bool plateaued = false;         ///< plateau_increase < 1e-8
  bool tail_decreasing = false;   ///< sqrt(tau) * gap falls across the final half
  double fitted_constant = 0.0;   ///< smallest C with gap <= C / sqrt(tau) for tau >= 10
};

/// Gap series q(mu(tau)) - q_star.
Diagnostics convergence_diagnostics(std::span<const double> q_series, double q_star);
Diagnostics convergence_diagnostics(const SolveReport& report);

}  // namespace crlab::solver
