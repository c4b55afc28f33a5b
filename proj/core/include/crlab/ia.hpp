#pragma once

// Interference alignment by zero-forcing: gain matrices, null-space bases
// and the reduced-variable form of the transmit weights.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "crlab/channel_allocation.hpp"

namespace crlab::ia {

/// G(k, j): real gain from transmitter k to user j. K rows, N columns.
using GainMatrix = Eigen::MatrixXd;

/// Columns whose condition number exceeds this are treated as dependent.
inline constexpr double kMaxCondition = 1e8;

/// A = (G^T)^{-1} for two transmitters and two receivers. Throws
/// SingularMatrixError when G^T is (numerically) singular.
Eigen::Matrix2d two_by_two_alignment(const Eigen::Matrix2d& g);

/// Zero-forcing needs at least as many transmitters as users.
bool feasibility(int users, int transmitters);

/// Basis of the null space of G_{-j} for one user. The first K-N columns are
/// shared by every user; the last column carries the user's signal.
struct NullSpaceBasis {
  Eigen::MatrixXd e;  ///< K x r, r = K - N + 1

  int width() const { return static_cast<int>(e.cols()); }
  Eigen::VectorXd last() const { return e.col(e.cols() - 1); }
};

/// Orthonormal basis of {x : G^T x = 0}, K x (K-N). Empty when K = N.
Eigen::MatrixXd shared_prefix(const GainMatrix& g);

/// Throws RankDeficientError naming the first column that depends on the
/// earlier ones, or DomainError when N > K or G is empty.
void check_rank(const GainMatrix& g);

/// One basis per user. Throws as check_rank.
std::vector<NullSpaceBasis> compute_bases(const GainMatrix& g);

/// a_j = e_j c_j for every user, as a K x N weight matrix.
Eigen::MatrixXd reconstruct_weights(std::span<const NullSpaceBasis> bases, std::span<const Eigen::VectorXd> coeffs);

/// max over j != n of |sum_k a(k,j) G(k,n)|.
double zero_forcing_residual(const GainMatrix& g, const Eigen::MatrixXd& weights);

/// Per-user gains after channel selection.
struct EffectiveGain {
  GainMatrix g;               ///< K x N, zero column for unassigned users
  std::vector<bool> assigned;
};

/// G(k, j) = sum_m b[j][m] H[m](k, j). `h` holds one K x N matrix per channel.
EffectiveGain effective_gain(const ChannelAllocation& b, std::span<const GainMatrix> h);

/// Gains seen under channel bonding: sum of H[m] over the available channels.
GainMatrix bonded_gain(std::span<const GainMatrix> h, std::span<const int> available);

/// PSNR increase in dB: (beta * bandwidth / horizon) * log2(1 + (c_last e_r^T G_j)^2 / noise).
/// beta * bandwidth must be in dB per bit/s-per-Hz unit (beta per Mb/s with
/// the bandwidth in MHz).
double psnr_increase(double c_last, const NullSpaceBasis& basis, const Eigen::VectorXd& g_j, double beta,
                     double bandwidth, double horizon, double noise);

/// Same quantity from the full weight vector: uses sum_k a(k,j) G(k,j).
double psnr_increase_from_weights(const Eigen::VectorXd& a_j, const Eigen::VectorXd& g_j, double beta,
                                  double bandwidth, double horizon, double noise);

/// Primal and dual variable counts before and after the reduction.
struct VariableCounts {
  int primal_original = 0;
  int primal_reduced = 0;
  int dual_original = 0;
  int dual_reduced = 0;
};

VariableCounts variable_counts(int users, int transmitters);

}  // namespace crlab::ia
