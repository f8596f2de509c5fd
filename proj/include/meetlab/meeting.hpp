#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <utility>
#include <vector>

#include "meetlab/chain.hpp"

namespace meetlab {

/// Two independent copies of the base chain viewed as one Markov chain on
/// ordered pairs. Meeting time = hitting time of the diagonal. Off-diagonal
/// states are indexed compactly; the diagonal is absorbed into right-hand
/// sides of the linear systems.
class ProductChain {
 public:
  explicit ProductChain(const TransitionKernel& base);

  int base_size() const { return n_; }
  int off_diagonal_count() const { return m_; }
  const std::pair<int, int>& state(int compact) const { return states_[compact]; }
  int compact_index(int a, int b) const { return index_[a * n_ + b]; }

  /// Total jump rate out of an off-diagonal state: rate into other
  /// off-diagonal states plus rate into the diagonal. Always 2.
  double total_rate(int compact) const;

  /// Solves (shift * Id - T) h = rhs (or the transposed system) over the
  /// off-diagonal states, where T holds the off-diagonal-to-off-diagonal
  /// jump weights. Direct sparse factorization for small bases, stationary
  /// Gauss-Seidel sweeps above the threshold.
  Eigen::VectorXd solve_shifted(double shift, const Eigen::VectorXd& rhs,
                                bool transpose) const;

 private:
  int n_;
  int m_;
  std::vector<int> index_;                  // (a*n+b) -> compact, -1 on diagonal
  std::vector<std::pair<int, int>> states_; // compact -> (a,b)
  Eigen::SparseMatrix<double, Eigen::RowMajor> moves_;      // T
  Eigen::SparseMatrix<double, Eigen::RowMajor> moves_t_;    // T^T
  std::vector<double> diagonal_rate_;       // jump rate into the diagonal
};

/// Exact meeting-time quantities; fields are populated by the operation that
/// produced the solution (means vs. Laplace transforms).
struct MeetingSolution {
  double lambda = 0.0;
  double laplace = 0.0;            // E[e^{-lambda M}] under pi (x) pi
  double mean = 0.0;               // E[M]
  Eigen::MatrixXd mean_matrix;     // E[M_{x,y}]; zero diagonal
  Eigen::VectorXd place_transform; // v(x) = E[e^{-lambda M}; X^U_M = x]
  Eigen::VectorXd f_lambda;        // v(x) / pi(x)
};

/// Mean meeting times for every ordered start pair plus the stationary
/// average, via one linear solve on the product chain.
MeetingSolution mean_meeting(const TransitionKernel& base);

/// Laplace transform of M and the meeting-place vector. The place transform
/// for all x comes from a single adjoint solve: v(x) = pi(x)^2 + u . r_x
/// where u solves the transposed resolvent system with the product
/// stationary law as right-hand side.
MeetingSolution laplace_meeting(const TransitionKernel& base, double lambda);

/// Residual of the Green identity (1/lambda) sum_z pi(z)^2 =
/// sum_x v(x) G_lambda(x,x). Exact up to linear-algebra rounding.
double verify_green_identity(const TransitionKernel& base, double lambda);

/// Residual of the split resolvent identity: sum pi^2 =
/// laplace * sum pi^2 + lambda0 * sum_x v(x) G^<_{lambda0}(x,x).
/// On regular graphs sum pi^2 = 1/N the split used on regular graphs.
double verify_res_identity(const TransitionKernel& base, double lambda0);

/// Trace-formula value of E[e^{-lambda M}] for symmetric kernels whose
/// diagonal return probabilities are constant across states. Throws
/// InvalidInput naming the failing power when constancy breaks.
double normalized_trace_transform(const TransitionKernel& base, double lambda,
                                  int constancy_depth = 6);

struct RMatrix {
  double lambda = 0.0;
  Eigen::MatrixXd entries;
};

/// R_lambda(x,y) = 2 (pi(y)/pi(x)) int e^{-lambda t} Q_t(y,x) QQ_t(y,x) dt,
/// evaluated in closed form through the spectral expansion of both factors.
RMatrix r_matrix(const SpectralDecomposition& spec, double lambda);

struct FixedPointReport {
  double equation_residual = 0.0;  // ||(Id + R) F - ((2+lambda)/lambda) pi||_max
  bool domination_ok = false;      // v(x) <= ((2+lambda)/lambda) pi(x)^2 entrywise
  double worst_excess = 0.0;       // max over x of v(x) - bound(x)
};

FixedPointReport verify_fixed_point(const TransitionKernel& base, double lambda);

/// Gap between the exact restricted-Green pairing at resolvent parameter
/// lambda/N and its infinite-tree series surrogate. Tends to zero across
/// growing locally tree-like k-regular graphs; stays bounded away from zero
/// on tori. Truncation depth is chosen so both geometric tails fall below
/// 1e-6 given the realized spectral gap.
double tree_series_gap(const TransitionKernel& base, int degree, double lambda,
                   double spectral_gap);

}  // namespace meetlab
