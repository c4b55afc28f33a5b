#include "crlab/ia.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crlab/error.hpp"

namespace crlab::ia {
namespace {

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

// Removes from v its projections on the columns of `basis` (not normalized),
// repeating once when the first pass cancels more than 99.9% of the norm.
Eigen::VectorXd project_out(Eigen::VectorXd v, const std::vector<Eigen::VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    const double before = v.norm();
    for (const auto& w : basis) v -= (v.dot(w) / w.squaredNorm()) * w;
    if (v.norm() > 1e-3 * before) break;
  }
  return v;
}

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw DomainError(std::string(name) + " must be finite");
}

}  // namespace

Eigen::Matrix2d two_by_two_alignment(const Eigen::Matrix2d& g) {
  const Eigen::Matrix2d gt = g.transpose();
  const double scale = gt.cwiseAbs().maxCoeff();
  const double det = gt.determinant();
  if (!(scale > 0.0) || std::abs(det) <= 1e-12 * scale * scale) {
    throw SingularMatrixError("G^T is singular (determinant " + std::to_string(det) + ")");
  }
  return gt.inverse();
}

bool feasibility(int users, int transmitters) { return users <= transmitters; }

void check_rank(const GainMatrix& g) {
  if (g.rows() == 0 || g.cols() == 0) throw DomainError("gain matrix is empty");
  if (g.cols() > g.rows()) {
    throw DomainError("zero-forcing needs N <= K, got N=" + std::to_string(g.cols()) + ", K=" +
                      std::to_string(g.rows()));
  }
  if (!g.allFinite()) throw DomainError("gain matrix has non-finite entries");
  if (condition_number(g) <= kMaxCondition) return;
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    if (condition_number(g.leftCols(j + 1)) > kMaxCondition) {
      throw RankDeficientError("gain column " + std::to_string(j) + " depends on the earlier columns",
                               static_cast<int>(j));
    }
  }
  throw RankDeficientError("gain matrix is rank deficient", static_cast<int>(g.cols() - 1));
}

Eigen::MatrixXd shared_prefix(const GainMatrix& g) {
  const Eigen::Index k = g.rows();
  const Eigen::Index n = g.cols();
  if (k == n) return Eigen::MatrixXd(k, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g.transpose(), Eigen::ComputeFullV);
  return svd.matrixV().rightCols(k - n);
}

std::vector<NullSpaceBasis> compute_bases(const GainMatrix& g) {
  check_rank(g);
  const Eigen::Index k = g.rows();
  const Eigen::Index n = g.cols();
  const Eigen::MatrixXd prefix = shared_prefix(g);
  std::vector<NullSpaceBasis> out(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<Eigen::VectorXd> omega;
    omega.reserve(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      omega.push_back(project_out(g.col(i), omega));
    }
    auto& basis = out[static_cast<std::size_t>(j)];
    basis.e.resize(k, k - n + 1);
    basis.e.leftCols(k - n) = prefix;
    basis.e.col(k - n) = project_out(g.col(j), omega);
  }
  return out;
}

Eigen::MatrixXd reconstruct_weights(std::span<const NullSpaceBasis> bases, std::span<const Eigen::VectorXd> coeffs) {
  if (bases.size() != coeffs.size()) throw DomainError("need one coefficient vector per basis");
  if (bases.empty()) return {};
  const Eigen::Index k = bases.front().e.rows();
  Eigen::MatrixXd a(k, static_cast<Eigen::Index>(bases.size()));
  for (std::size_t j = 0; j < bases.size(); ++j) {
    if (coeffs[j].size() != bases[j].e.cols()) throw DomainError("coefficient length does not match basis width");
    a.col(static_cast<Eigen::Index>(j)) = bases[j].e * coeffs[j];
  }
  return a;
}

double zero_forcing_residual(const GainMatrix& g, const Eigen::MatrixXd& weights) {
  if (weights.rows() != g.rows() || weights.cols() != g.cols()) throw DomainError("weight and gain shapes differ");
  const Eigen::MatrixXd cross = weights.transpose() * g;  // (j, n) = sum_k a(k,j) G(k,n)
  double worst = 0.0;
  for (Eigen::Index j = 0; j < cross.rows(); ++j) {
    for (Eigen::Index n = 0; n < cross.cols(); ++n) {
      if (j != n) worst = std::max(worst, std::abs(cross(j, n)));
    }
  }
  return worst;
}

EffectiveGain effective_gain(const ChannelAllocation& b, std::span<const GainMatrix> h) {
  if (h.size() != static_cast<std::size_t>(b.channels)) throw DomainError("need one gain matrix per channel");
  if (h.empty()) throw DomainError("no channels");
  const Eigen::Index k = h.front().rows();
  EffectiveGain out;
  out.g = GainMatrix::Zero(k, b.users);
  out.assigned.assign(static_cast<std::size_t>(b.users), false);
  for (int j = 0; j < b.users; ++j) {
    for (int m = 0; m < b.channels; ++m) {
      if (!b.at(j, m)) continue;
      const auto& hm = h[static_cast<std::size_t>(m)];
      if (hm.rows() != k || hm.cols() != b.users) throw DomainError("per-channel gain matrices must be K x N");
      out.g.col(j) += hm.col(j);
      out.assigned[static_cast<std::size_t>(j)] = true;
    }
  }
  return out;
}

GainMatrix bonded_gain(std::span<const GainMatrix> h, std::span<const int> available) {
  if (h.empty()) throw DomainError("no channels");
  GainMatrix g = GainMatrix::Zero(h.front().rows(), h.front().cols());
  for (int m : available) {
    if (m < 0 || static_cast<std::size_t>(m) >= h.size()) throw DomainError("available channel out of range");
    g += h[static_cast<std::size_t>(m)];
  }
  return g;
}

double psnr_increase(double c_last, const NullSpaceBasis& basis, const Eigen::VectorXd& g_j, double beta,
                     double bandwidth, double horizon, double noise) {
  require_finite(c_last, "c_last");
  const double amplitude = c_last * basis.last().dot(g_j);
  return beta * bandwidth / horizon * std::log2(1.0 + amplitude * amplitude / noise);
}

double psnr_increase_from_weights(const Eigen::VectorXd& a_j, const Eigen::VectorXd& g_j, double beta,
                                  double bandwidth, double horizon, double noise) {
  const double amplitude = a_j.dot(g_j);
  return beta * bandwidth / horizon * std::log2(1.0 + amplitude * amplitude / noise);
}

VariableCounts variable_counts(int users, int transmitters) {
  if (users < 1 || users > transmitters) throw DomainError("variable counts need 1 <= N <= K");
  return {transmitters * users, (transmitters - users + 1) * users, users * (users - 1) + transmitters,
          transmitters};
}

}  // namespace crlab::ia
