#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace meetlab {

/// Finite irreducible reversible Markov transition kernel with zero trace,
/// together with its stationary distribution. Immutable after construction.
struct TransitionKernel {
  Eigen::MatrixXd entries;  // row-stochastic, zero diagonal
  Eigen::VectorXd pi;       // stationary distribution, strictly positive

  int n() const { return static_cast<int>(pi.size()); }
  bool is_symmetric(double tol = 1e-12) const;

  /// Validates all kernel invariants (row sums, zero trace, reversibility,
  /// irreducibility, stationarity of pi). Throws InvalidInput on violation.
  static TransitionKernel create(Eigen::MatrixXd entries, Eigen::VectorXd pi);

  /// Derives pi from the entries (reversible kernels only), then validates.
  static TransitionKernel from_entries(const Eigen::MatrixXd& entries);
};

/// Nearest-neighbor walk on a simple connected graph given by adjacency
/// lists: Q(x,y) = 1/deg(x) on edges, pi(x) proportional to deg(x).
TransitionKernel kernel_from_graph(const std::vector<std::vector<int>>& neighbors);

/// S(x,y) = pi(x)^{1/2} Q(x,y) pi(y)^{-1/2}; symmetric for reversible Q.
Eigen::MatrixXd symmetrize(const TransitionKernel& kernel);

/// Eigenvalues (descending) and orthonormal eigenvectors of the symmetrized
/// kernel. All functional calculus routes through this.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // descending; eigenvalues[0] == 1
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, matched order
  Eigen::VectorXd pi;
  Eigen::VectorXd pi_sqrt;
  bool gap_warning = false;  // top two eigenvalues closer than 1e-8

  int n() const { return static_cast<int>(eigenvalues.size()); }
};

/// Dense symmetric eigendecomposition. Kernels larger than `max_dense`
/// states are refused; full spectra are only needed at desk scale.
SpectralDecomposition eigendecompose(const TransitionKernel& kernel,
                                     int max_dense = 2048);

/// f(Q)(x,y) = pi(x)^{-1/2} f(S)(x,y) pi(y)^{1/2} with f applied to the
/// eigenvalues. Throws SingularityError if f is non-finite at an eigenvalue.
Eigen::MatrixXd apply_function(const SpectralDecomposition& spec,
                               const std::function<double(double)>& f);

/// Transition kernel of the rate-1 continuous-time chain: e^{t(Q-1)}.
Eigen::MatrixXd heat_kernel(const SpectralDecomposition& spec, double t);

struct GreenEvaluation {
  double lambda = 0.0;
  Eigen::MatrixXd values;
  bool restricted = false;  // eigenvalue-1 spectral component removed
};

/// Resolvent Green function G_lambda(x,y) = int_0^inf e^{-lambda t}
/// P(X^x_t = Y^y_t) dt, evaluated through the spectral sum; valid for any
/// reversible kernel. restricted=true removes the eigenvalue-1 component
/// (G^<), which also makes lambda = 0 admissible.
GreenEvaluation green_function(const SpectralDecomposition& spec, double lambda,
                               bool restricted);

/// Extremal eigenvalues (second-largest and smallest) of a symmetric
/// stochastic matrix given through its matrix-vector product, via shifted
/// power iteration with deflation of the uniform direction. Used when the
/// dense eigensolve budget is exceeded.
struct ExtremalEigenvalues {
  double lambda2;
  double lambda_min;
};
using MatVec = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
ExtremalEigenvalues extremal_eigenvalues(int n, const MatVec& apply_q,
                                         double tol = 1e-10,
                                         int max_iter = 200000);

}  // namespace meetlab
