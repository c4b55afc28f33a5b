#include "crlab/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "crlab/error.hpp"

namespace crlab::solver {
namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kStepGrowth = 2.0;
constexpr std::size_t kStepWindow = 10;

// Rate term lambda as a function of the signal power x = c_r^2.
double rate(const Subproblem& s, double x) { return s.rate_coeff * std::log2(1.0 + s.snr_gain * x); }

double objective_x(const Subproblem& s, double x) {
  return s.success_prob * std::log(s.psnr + rate(s, x)) + (1.0 - s.success_prob) * std::log(s.psnr);
}

double objective_slope_x(const Subproblem& s, double x) {
  return s.success_prob * s.rate_coeff * s.snr_gain / ((1.0 + s.snr_gain * x) * kLn2 * (s.psnr + rate(s, x)));
}

double objective_curvature_x(const Subproblem& s, double x) {
  const double u = 1.0 + s.snr_gain * x;
  const double d1 = s.rate_coeff * s.snr_gain / (u * kLn2);
  const double d2 = -d1 * s.snr_gain / u;
  const double w = s.psnr + rate(s, x);
  return s.success_prob * (d2 * w - d1 * d1) / (w * w);
}

// Prefix coefficients per unit of c_r that minimize the penalty, and the
// penalty per unit of x left after that minimization.
struct Reduced {
  Eigen::VectorXd prefix_per_unit;
  double penalty = 0.0;
};

Reduced reduce(const Subproblem& s, const Eigen::VectorXd& mu) {
  const Eigen::Index r = s.e.cols();
  const Eigen::MatrixXd m = s.e.transpose() * mu.asDiagonal() * s.e;
  Reduced out;
  if (r == 1) {
    out.penalty = std::max(0.0, m(0, 0));
    out.prefix_per_unit.resize(0);
    return out;
  }
  const Eigen::MatrixXd mpp = m.topLeftCorner(r - 1, r - 1);
  const Eigen::VectorXd mpr = m.topRightCorner(r - 1, 1);
  out.prefix_per_unit = -mpp.completeOrthogonalDecomposition().solve(mpr);
  out.penalty = std::max(0.0, m(r - 1, r - 1) + mpr.dot(out.prefix_per_unit));
  return out;
}

Eigen::VectorXd assemble(const Reduced& red, double c_last) {
  Eigen::VectorXd c(red.prefix_per_unit.size() + 1);
  c.head(red.prefix_per_unit.size()) = red.prefix_per_unit * c_last;
  c(c.size() - 1) = c_last;
  return c;
}

Eigen::VectorXd node_power(std::span<const Subproblem> subs, std::span<const Eigen::VectorXd> c) {
  Eigen::VectorXd power = Eigen::VectorXd::Zero(subs.front().e.rows());
  for (std::size_t j = 0; j < subs.size(); ++j) power += (subs[j].e * c[j]).cwiseAbs2();
  return power;
}

// Best signal powers for fixed coefficient shapes. Node power is linear in x
// (power = d x), so this is a small concave program; a log barrier with
// Newton steps solves it from any strictly feasible start.
Eigen::VectorXd reallocate(std::span<const Subproblem> subs, const Eigen::MatrixXd& d, Eigen::VectorXd x,
                           double p_max) {
  const Eigen::Index n = x.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double dmax = d.col(j).maxCoeff();
    if (!(dmax > 0.0)) return x;
    x(j) = std::max(x(j), 1e-6 * p_max / dmax);
  }
  x *= std::min(1.0, 0.99 * p_max / (d * x).maxCoeff());

  auto barrier_value = [&](const Eigen::VectorXd& v, double t) {
    const Eigen::VectorXd slack = Eigen::VectorXd::Constant(d.rows(), p_max) - d * v;
    if (slack.minCoeff() <= 0.0 || v.minCoeff() <= 0.0) return -std::numeric_limits<double>::infinity();
    double f = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) f += objective_x(subs[static_cast<std::size_t>(j)], v(j)) + t * std::log(v(j));
    return f + t * slack.array().log().sum();
  };

  for (double t = 1e-4; t * static_cast<double>(d.rows() + n) > 1e-13; t *= 0.1) {
    double value = barrier_value(x, t);
    for (int it = 0; it < 100; ++it) {
      const Eigen::VectorXd inv_slack = (Eigen::VectorXd::Constant(d.rows(), p_max) - d * x).cwiseInverse();
      Eigen::VectorXd grad = -t * d.transpose() * inv_slack;
      Eigen::MatrixXd neg_hess = t * d.transpose() * inv_slack.cwiseAbs2().asDiagonal() * d;
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto& sub = subs[static_cast<std::size_t>(j)];
        grad(j) += objective_slope_x(sub, x(j)) + t / x(j);
        neg_hess(j, j) += t / (x(j) * x(j)) - objective_curvature_x(sub, x(j));
      }
      const Eigen::VectorXd dir = neg_hess.ldlt().solve(grad);
      const double decrement = grad.dot(dir);
      if (!(decrement > 1e-14)) break;
      double alpha = 1.0;
      double next = barrier_value(x + dir, t);
      while (!(next >= value + 0.25 * alpha * decrement) && alpha > 1e-12) {
        alpha *= 0.5;
        next = barrier_value(x + alpha * dir, t);
      }
      if (alpha <= 1e-12) break;
      x += alpha * dir;
      value = next;
    }
  }
  return x;
}

double primal_value(std::span<const Subproblem> subs, std::span<const Eigen::VectorXd> c) {
  double v = 0.0;
  for (std::size_t j = 0; j < subs.size(); ++j) v += expected_log_psnr(subs[j], c[j](c[j].size() - 1));
  return v;
}

}  // namespace

void Problem::validate() const {
  if (gains.cols() != static_cast<Eigen::Index>(users.size())) {
    throw DomainError("need one user term per gain column");
  }
  if (!(p_max > 0.0) || !std::isfinite(p_max)) throw DomainError("p_max must be positive");
  if (!(noise > 0.0) || !std::isfinite(noise)) throw DomainError("noise must be positive");
  for (const auto& u : users) {
    if (!(u.psnr > 0.0)) throw DomainError("PSNR must be positive (log domain)");
    if (!(u.success_prob >= 0.0 && u.success_prob <= 1.0)) throw DomainError("success probability outside [0,1]");
    if (!(u.rate_coeff >= 0.0) || !std::isfinite(u.rate_coeff)) throw DomainError("rate coefficient must be >= 0");
  }
}

Subproblem make_subproblem(const Problem& p, const ia::NullSpaceBasis& basis, int user) {
  const auto& u = p.users[static_cast<std::size_t>(user)];
  const double amp = basis.last().dot(p.gains.col(user));
  return {u.psnr, u.success_prob, u.rate_coeff, amp * amp / p.noise, basis.e};
}

double expected_log_psnr(const Subproblem& s, double c_last) { return objective_x(s, c_last * c_last); }

double lagrangian(const Subproblem& s, const Eigen::VectorXd& c, const Eigen::VectorXd& mu) {
  const Eigen::VectorXd a = s.e * c;
  return expected_log_psnr(s, c(c.size() - 1)) - mu.dot(a.cwiseAbs2());
}

Eigen::VectorXd lagrangian_gradient(const Subproblem& s, const Eigen::VectorXd& c, const Eigen::VectorXd& mu) {
  const Eigen::VectorXd a = s.e * c;
  Eigen::VectorXd grad = -2.0 * s.e.transpose() * mu.asDiagonal() * a;
  const double cr = c(c.size() - 1);
  grad(grad.size() - 1) += 2.0 * cr * objective_slope_x(s, cr * cr);
  return grad;
}

bool subproblem_bounded(const Subproblem& s, const Eigen::VectorXd& mu) {
  return reduce(s, mu).penalty > 0.0 || s.success_prob * s.rate_coeff * s.snr_gain == 0.0;
}

LocalResult local_subproblem(const Subproblem& s, const Eigen::VectorXd& mu, double c_last_start, double step,
                             const Options& options) {
  if (!(step > 0.0)) throw DomainError("primal step must be positive");
  const Reduced red = reduce(s, mu);
  const bool bounded = red.penalty > 0.0 || s.success_prob * s.rate_coeff * s.snr_gain == 0.0;
  auto value = [&](double x) { return objective_x(s, x) - red.penalty * x; };

  LocalResult out;
  double x = c_last_start * c_last_start;
  double v = value(x);
  double phi = step;
  int it = 0;
  for (; it < options.inner_max_iterations; ++it) {
    const double g = objective_slope_x(s, x) - red.penalty;
    if (!std::isfinite(g) || !std::isfinite(x)) {
      std::ostringstream msg;
      msg << std::setprecision(17) << "non-finite subproblem gradient at x=" << x << ", step=" << phi
          << ", penalty=" << red.penalty;
      throw NumericError(msg.str());
    }
    if (bounded && (std::abs(g) < options.inner_tol || (x <= 0.0 && g <= 0.0))) break;
    const double xn = std::max(0.0, x + phi * g);
    const double vn = value(xn);
    if (vn >= v) {
      x = xn;
      v = vn;
      phi *= 1.5;
    } else {
      phi *= 0.5;
      if (phi < 1e-300) break;
    }
  }
  out.iterations = it;
  out.hit_cap = it >= options.inner_max_iterations;
  out.unbounded = !bounded;
  out.step = std::clamp(phi, 1e-12, 1e12);
  out.c = assemble(red, std::sqrt(x));
  out.value = lagrangian(s, out.c, mu);
  return out;
}

Eigen::VectorXd dual_gradient(std::span<const Subproblem> subs, std::span<const Eigen::VectorXd> c, double p_max) {
  if (subs.empty()) throw DomainError("no users");
  return Eigen::VectorXd::Constant(subs.front().e.rows(), p_max) - node_power(subs, c);
}

DualStep dual_update(const DualState& state, const Eigen::VectorXd& gradient, double q_dual, double q_hat) {
  DualStep out;
  out.state = state;
  out.state.tau = state.tau + 1;
  out.state.q_history.push_back(q_dual);
  Eigen::VectorXd effective = gradient;
  for (Eigen::Index k = 0; k < effective.size(); ++k) {
    if (state.mu(k) <= 0.0 && gradient(k) > 0.0) effective(k) = 0.0;
  }
  const double norm2 = effective.squaredNorm();
  if (norm2 == 0.0) {
    out.converged = true;
    return out;
  }
  const double rho = std::max(0.0, q_dual - q_hat) / norm2;
  out.state.mu = (state.mu - rho * gradient).cwiseMax(0.0);
  out.step_norm = (out.state.mu - state.mu).norm();
  return out;
}

double SolveReport::relative_gap() const {
  const double denom = std::max(std::abs(objective), std::numeric_limits<double>::min());
  return (dual_objective - objective) / denom;
}

double SolveReport::max_node_power() const {
  if (weights.size() == 0) return 0.0;
  return weights.cwiseAbs2().rowwise().sum().maxCoeff();
}

SolveReport solve(const Problem& problem, const Options& options, std::span<const ia::NullSpaceBasis> bases) {
  problem.validate();
  const Eigen::Index k = problem.gains.rows();
  const Eigen::Index n = problem.gains.cols();
  SolveReport report;
  if (n == 0) {
    report.weights.resize(k, 0);
    report.converged = true;
    return report;
  }
  if (!ia::feasibility(static_cast<int>(n), static_cast<int>(k))) {
    throw DomainError("more users than transmitters");
  }

  if (n == 1) {
    // Every node transmits the single stream at full power, phase-matched to its gain.
    report.weights.resize(k, 1);
    for (Eigen::Index i = 0; i < k; ++i) {
      report.weights(i, 0) = (problem.gains(i, 0) < 0.0 ? -1.0 : 1.0) * std::sqrt(problem.p_max);
    }
    const double amp = report.weights.col(0).dot(problem.gains.col(0));
    const auto& u = problem.users.front();
    const double lambda = u.rate_coeff * std::log2(1.0 + amp * amp / problem.noise);
    report.objective = u.success_prob * std::log(u.psnr + lambda) + (1.0 - u.success_prob) * std::log(u.psnr);
    report.dual_objective = report.objective;
    report.coefficients = {report.weights.col(0)};
    report.converged = true;
    return report;
  }

  std::vector<ia::NullSpaceBasis> own;
  if (bases.empty()) {
    own = ia::compute_bases(problem.gains);
    bases = own;
  } else {
    ia::check_rank(problem.gains);
  }
  if (bases.size() != static_cast<std::size_t>(n)) throw DomainError("need one basis per user");

  std::vector<Subproblem> subs;
  subs.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    subs.push_back(make_subproblem(problem, bases[static_cast<std::size_t>(j)], static_cast<int>(j)));
  }

  DualState state;
  state.mu = Eigen::VectorXd::Constant(k, options.mu0);
  std::vector<double> c_last(static_cast<std::size_t>(n), 1.0);
  std::vector<double> steps(static_cast<std::size_t>(n), options.step);
  std::vector<Eigen::VectorXd> c(static_cast<std::size_t>(n));
  std::vector<Eigen::VectorXd> best_c;
  double best_primal = -std::numeric_limits<double>::infinity();
  double best_dual = std::numeric_limits<double>::infinity();

  Eigen::VectorXd mu_prev = state.mu;
  std::array<double, kStepWindow> recent_steps;
  recent_steps.fill(std::numeric_limits<double>::infinity());
  for (int tau = 1; tau <= options.max_iterations; ++tau) {
    // A dual point that leaves some user's direction unpenalized has no
    // finite q; pull it back toward the previous (bounded) point.
    for (int retry = 0; retry < 64; ++retry) {
      bool bounded = true;
      for (const auto& sub : subs) bounded = bounded && subproblem_bounded(sub, state.mu);
      if (bounded) break;
      state.mu = 0.5 * (state.mu + mu_prev);
    }
    mu_prev = state.mu;
    double q = problem.p_max * state.mu.sum();
    for (std::size_t j = 0; j < subs.size(); ++j) {
      const auto local = local_subproblem(subs[j], state.mu, c_last[j], steps[j], options);
      c[j] = local.c;
      c_last[j] = local.c(local.c.size() - 1);
      steps[j] = local.step;
      q += local.value;
    }
    best_dual = std::min(best_dual, q);

    // Feasible primal point: keep each user's coefficient shape and share the
    // power budget among the signal powers.
    const Eigen::VectorXd power = node_power(subs, c);
    {
      Eigen::MatrixXd d(k, n);
      Eigen::VectorXd x(n);
      std::vector<Eigen::VectorXd> shapes(subs.size());
      for (std::size_t j = 0; j < subs.size(); ++j) {
        shapes[j] = assemble(reduce(subs[j], state.mu), 1.0);
        d.col(static_cast<Eigen::Index>(j)) = (subs[j].e * shapes[j]).cwiseAbs2();
        x(static_cast<Eigen::Index>(j)) = c_last[j] * c_last[j];
      }
      x = reallocate(subs, d, x, problem.p_max);
      std::vector<Eigen::VectorXd> candidate(subs.size());
      for (std::size_t j = 0; j < subs.size(); ++j) candidate[j] = shapes[j] * std::sqrt(x(static_cast<Eigen::Index>(j)));
      const double primal = primal_value(subs, candidate);
      if (primal > best_primal && node_power(subs, candidate).maxCoeff() <= problem.p_max * (1.0 + 1e-12)) {
        best_primal = primal;
        best_c = candidate;
      }
    }

    report.q_dual.push_back(q);
    report.trace.push_back({tau, q, best_primal, q - best_primal, state.mu.norm()});
    report.iterations = tau;

    DualStep step = dual_update(state, problem.p_max - power.array(), q, 0.5 * (q + best_primal));
    if (step.converged) {
      report.converged = true;
      report.final_step = 0.0;
      break;
    }
    // The q* estimate lags behind, so near the optimum the Polyak step can
    // jump far out; cap it at twice the longest of the recent steps.
    const double cap = kStepGrowth * *std::max_element(recent_steps.begin(), recent_steps.end());
    if (step.step_norm > cap) {
      const double shrink = cap / step.step_norm;
      step.state.mu = state.mu + shrink * (step.state.mu - state.mu);
      step.step_norm *= shrink;
    }
    recent_steps[static_cast<std::size_t>(tau) % recent_steps.size()] = step.step_norm;
    state = step.state;
    report.final_step = step.step_norm;
    const double rel_gap = (q - best_primal) / std::max(std::abs(best_primal), 1.0);
    const double certified_gap = (best_dual - best_primal) / std::max(std::abs(best_primal), 1.0);
    if ((step.step_norm <= options.kappa_conv && rel_gap <= options.gap_tol) ||
        certified_gap <= options.certificate_tol) {
      report.converged = true;
      break;
    }
  }

  report.mu = state.mu;
  report.coefficients = best_c;
  report.weights = ia::reconstruct_weights(bases, best_c);
  report.objective = best_primal;
  report.dual_objective = best_dual;
  return report;
}

SolveReport solve_bonded(std::span<const ia::GainMatrix> h, std::span<const int> available,
                         const std::vector<UserTerm>& users, double p_max, double noise, const Options& options) {
  return solve(Problem{ia::bonded_gain(h, available), users, p_max, noise}, options);
}

Problem reference_problem() {
  Problem p;
  p.gains.resize(4, 3);
  p.gains << 0.3791, 0.3830, 0.7746,
             0.1458, 0.6574, 1.5566,
             0.7977, 0.2781, 0.9185,
             1.0042, 0.3061, 0.9013;
  p.users = {{28.2, 0.8, 0.45}, {25.6, 0.8, 0.39}, {27.3, 0.8, 0.41}};
  p.p_max = 10.0;
  p.noise = 1.0;
  return p;
}

void write_trace_csv(std::ostream& os, const SolveReport& report) {
  os << "tau,q_dual,q_primal,gap,mu_norm\n";
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(17);
  for (const auto& r : report.trace) {
    os << r.tau << ',' << r.q_dual << ',' << r.q_primal << ',' << r.gap << ',' << r.mu_norm << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

Diagnostics convergence_diagnostics(std::span<const double> q_series, double q_star) {
  Diagnostics d;
  const std::size_t n = q_series.size();
  if (n == 0) return d;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = q_series[i] - q_star;
    sum += gap * gap;
    d.squared_gap_partial_sums.push_back(sum);
    d.sqrt_tau_gap.push_back(std::sqrt(static_cast<double>(i + 1)) * std::abs(gap));
  }
  const std::size_t tenth = std::max<std::size_t>(1, n / 10);
  d.plateau_increase = n > tenth ? d.squared_gap_partial_sums.back() - d.squared_gap_partial_sums[n - tenth - 1]
                                 : d.squared_gap_partial_sums.back();
  d.plateaued = d.plateau_increase < 1e-8;

  // Final half split into two quarters; the later one must have the smaller mean.
  const std::size_t half = n / 2;
  if (n >= 4) {
    const std::size_t mid = half + (n - half) / 2;
    double first = 0.0, second = 0.0;
    for (std::size_t i = half; i < mid; ++i) first += d.sqrt_tau_gap[i];
    for (std::size_t i = mid; i < n; ++i) second += d.sqrt_tau_gap[i];
    first /= static_cast<double>(mid - half);
    second /= static_cast<double>(n - mid);
    d.tail_decreasing = second < first;
  }

  const std::size_t from = n > 10 ? 9 : 0;
  for (std::size_t i = from; i < n; ++i) d.fitted_constant = std::max(d.fitted_constant, d.sqrt_tau_gap[i]);
  return d;
}

Diagnostics convergence_diagnostics(const SolveReport& report) {
  return convergence_diagnostics(report.q_dual, report.objective);
}

}  // namespace crlab::solver
