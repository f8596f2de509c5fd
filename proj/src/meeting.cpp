#include "meetlab/meeting.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <cmath>
#include <string>

#include "meetlab/errors.hpp"
#include "meetlab/graph.hpp"
#include "meetlab/mckay.hpp"

namespace meetlab {

namespace {

// Direct factorization pays off only for small bases: product chains of
// expanders have no good separators, so LU fill-in explodes with size while
// the shifted systems stay diagonally dominant and cheap to sweep.
constexpr int kDirectSolveLimit = 40;    // base states; above this, sweeps
constexpr double kSweepTol = 1e-12;
constexpr int kMaxSweeps = 100000;

}  // namespace

ProductChain::ProductChain(const TransitionKernel& base) : n_(base.n()) {
  m_ = n_ * n_ - n_;
  index_.assign(static_cast<std::size_t>(n_) * n_, -1);
  states_.reserve(m_);
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      if (a == b) continue;
      index_[a * n_ + b] = static_cast<int>(states_.size());
      states_.emplace_back(a, b);
    }
  }

  std::vector<std::vector<int>> support(n_);
  for (int x = 0; x < n_; ++x) {
    for (int y = 0; y < n_; ++y) {
      if (base.entries(x, y) > 0.0) support[x].push_back(y);
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  diagonal_rate_.assign(m_, 0.0);
  for (int z = 0; z < m_; ++z) {
    auto [a, b] = states_[z];
    for (int a2 : support[a]) {
      if (a2 == b) {
        diagonal_rate_[z] += base.entries(a, a2);
      } else {
        triplets.emplace_back(z, index_[a2 * n_ + b], base.entries(a, a2));
      }
    }
    for (int b2 : support[b]) {
      if (b2 == a) {
        diagonal_rate_[z] += base.entries(b, b2);
      } else {
        triplets.emplace_back(z, index_[a * n_ + b2], base.entries(b, b2));
      }
    }
  }
  moves_.resize(m_, m_);
  moves_.setFromTriplets(triplets.begin(), triplets.end());
  moves_t_ = moves_.transpose();
}

double ProductChain::total_rate(int compact) const {
  double rate = diagonal_rate_[compact];
  for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(moves_, compact);
       it; ++it) {
    rate += it.value();
  }
  return rate;
}

Eigen::VectorXd ProductChain::solve_shifted(double shift, const Eigen::VectorXd& rhs,
                                            bool transpose) const {
  const auto& t = transpose ? moves_t_ : moves_;
  if (n_ <= kDirectSolveLimit) {
    Eigen::SparseMatrix<double> a = -t;
    for (int z = 0; z < m_; ++z) a.coeffRef(z, z) += shift;
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    if (lu.info() != Eigen::Success) {
      throw NumericalFailure("product-chain solve: sparse LU factorization failed");
    }
    Eigen::VectorXd h = lu.solve(rhs);
    if (lu.info() != Eigen::Success) {
      throw NumericalFailure("product-chain solve: sparse LU backsolve failed");
    }
    return h;
  }

  // Gauss-Seidel; the shifted system has diagonal `shift` against off-diagonal
  // row sums at most 2, so sweeps contract for shift > 2.
  Eigen::VectorXd h = Eigen::VectorXd::Zero(m_);
  const double rhs_scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    for (int z = 0; z < m_; ++z) {
      double acc = rhs(z);
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(t, z); it;
           ++it) {
        acc += it.value() * h(it.col());
      }
      h(z) = acc / shift;
    }
    double residual = ((shift * h - t * h) - rhs).cwiseAbs().maxCoeff();
    if (residual <= kSweepTol * rhs_scale) {
      return h;
    }
  }
  double residual = ((shift * h - t * h) - rhs).cwiseAbs().maxCoeff();
  throw NumericalFailure("product-chain solve: " + std::to_string(kMaxSweeps) +
                         " sweeps, residual " + std::to_string(residual));
}

MeetingSolution mean_meeting(const TransitionKernel& base) {
  const int n = base.n();
  ProductChain product(base);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(product.off_diagonal_count());
  // 2 m(z) = 1 + sum of jump-weighted neighbors; diagonal states pinned at 0.
  Eigen::VectorXd m = product.solve_shifted(2.0, rhs, /*transpose=*/false);

  MeetingSolution sol;
  sol.mean_matrix = Eigen::MatrixXd::Zero(n, n);
  double mean = 0.0;
  for (int z = 0; z < product.off_diagonal_count(); ++z) {
    auto [a, b] = product.state(z);
    sol.mean_matrix(a, b) = m(z);
    mean += base.pi(a) * base.pi(b) * m(z);
  }
  sol.mean = mean;
  return sol;
}

MeetingSolution laplace_meeting(const TransitionKernel& base, double lambda) {
  if (lambda <= 0.0) {
    throw InvalidInput("laplace_meeting: lambda must be positive");
  }
  const int n = base.n();
  ProductChain product(base);
  const int m = product.off_diagonal_count();

  Eigen::VectorXd weight(m);
  for (int z = 0; z < m; ++z) {
    auto [a, b] = product.state(z);
    weight(z) = base.pi(a) * base.pi(b);
  }
  Eigen::VectorXd u = product.solve_shifted(lambda + 2.0, weight, /*transpose=*/true);

  // v(x) = pi(x)^2 + u . r_x with r_x the jump weights into (x,x).
  Eigen::VectorXd v(n);
  for (int x = 0; x < n; ++x) {
    double acc = base.pi(x) * base.pi(x);
    for (int a = 0; a < n; ++a) {
      if (a == x) continue;
      if (base.entries(a, x) > 0.0) {
        acc += u(product.compact_index(a, x)) * base.entries(a, x);
        acc += u(product.compact_index(x, a)) * base.entries(a, x);
      }
    }
    v(x) = acc;
  }

  MeetingSolution sol;
  sol.lambda = lambda;
  sol.place_transform = v;
  sol.f_lambda = v.cwiseQuotient(base.pi);
  sol.laplace = v.sum();
  return sol;
}

double verify_green_identity(const TransitionKernel& base, double lambda) {
  MeetingSolution sol = laplace_meeting(base, lambda);
  SpectralDecomposition spec = eigendecompose(base);
  GreenEvaluation green = green_function(spec, lambda, /*restricted=*/false);
  double lhs = base.pi.squaredNorm() / lambda;
  double rhs = sol.place_transform.dot(green.values.diagonal());
  return std::abs(lhs - rhs);
}

double verify_res_identity(const TransitionKernel& base, double lambda0) {
  MeetingSolution sol = laplace_meeting(base, lambda0);
  SpectralDecomposition spec = eigendecompose(base);
  GreenEvaluation green = green_function(spec, lambda0, /*restricted=*/true);
  double pi2 = base.pi.squaredNorm();
  double rhs = pi2 * sol.laplace +
               lambda0 * sol.place_transform.dot(green.values.diagonal());
  return std::abs(pi2 - rhs);
}

double normalized_trace_transform(const TransitionKernel& base, double lambda,
                                  int constancy_depth) {
  if (lambda <= 0.0) {
    throw InvalidInput("normalized_trace_transform: lambda must be positive");
  }
  if (!base.is_symmetric()) {
    throw InvalidInput("normalized_trace_transform: kernel must be symmetric");
  }
  for (const ConstancyEntry& entry : constancy_check(base, constancy_depth)) {
    if (!entry.constant) {
      throw InvalidInput("normalized_trace_transform: Q^" + std::to_string(entry.ell) +
                         "(x,x) is not constant across states");
    }
  }
  const int n = base.n();
  SpectralDecomposition spec = eigendecompose(base);
  double trace = 0.0;
  for (int i = 0; i < n; ++i) {
    trace += 1.0 / (lambda + 2.0 * (1.0 - spec.eigenvalues(i)));
  }
  return (1.0 / (lambda * n)) / (trace / n);
}

RMatrix r_matrix(const SpectralDecomposition& spec, double lambda) {
  if (lambda <= 0.0) {
    throw InvalidInput("r_matrix: lambda must be positive");
  }
  const int n = spec.n();
  // Closed form from inserting the spectral expansions of Q_t and QQ_t into
  // the defining integral:
  //   R(x,y) = 2 sum_{q,q'} q'/(lambda+2-q-q')
  //              phi_q(x) phi_q(y) phi_{q'}(x) phi_{q'}(y);
  // the pi factors cancel. Symmetrizing the coefficient kernel in (q,q')
  // leaves the quadratic form unchanged, and its own eigendecomposition
  // K = sum_s s u u^T turns R into a sum of n Hadamard squares:
  //   R = 2 sum_s s (Phi diag(u) Phi^T) o (Phi diag(u) Phi^T).
  Eigen::MatrixXd coeff(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      coeff(i, j) = 0.5 * (spec.eigenvalues(i) + spec.eigenvalues(j)) /
                    (lambda + 2.0 - spec.eigenvalues(i) - spec.eigenvalues(j));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> coeff_eigen(coeff);
  if (coeff_eigen.info() != Eigen::Success) {
    throw NumericalFailure("r_matrix: coefficient eigendecomposition failed");
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    Eigen::MatrixXd b = spec.eigenvectors *
                        coeff_eigen.eigenvectors().col(s).asDiagonal() *
                        spec.eigenvectors.transpose();
    r += coeff_eigen.eigenvalues()(s) * b.cwiseProduct(b);
  }
  RMatrix out;
  out.lambda = lambda;
  out.entries = 2.0 * r;
  return out;
}

FixedPointReport verify_fixed_point(const TransitionKernel& base, double lambda) {
  MeetingSolution sol = laplace_meeting(base, lambda);
  SpectralDecomposition spec = eigendecompose(base);
  RMatrix r = r_matrix(spec, lambda);
  const double factor = (2.0 + lambda) / lambda;

  FixedPointReport report;
  Eigen::VectorXd residual =
      sol.f_lambda + r.entries * sol.f_lambda - factor * base.pi;
  report.equation_residual = residual.cwiseAbs().maxCoeff();

  Eigen::VectorXd bound = factor * base.pi.cwiseProduct(base.pi);
  report.worst_excess = (sol.place_transform - bound).maxCoeff();
  report.domination_ok = report.worst_excess <= 1e-12;
  return report;
}

namespace {

// Smallest L with r^{L+1}/(1-r) <= tol.
int geometric_truncation(double ratio, double tol) {
  if (ratio <= 0.0) return 1;
  double need = std::log(tol * (1.0 - ratio)) / std::log(ratio) - 1.0;
  return std::max(1, static_cast<int>(std::ceil(need)));
}

}  // namespace

double tree_series_gap(const TransitionKernel& base, int degree, double lambda,
                   double spectral_gap) {
  if (lambda <= 0.0) {
    throw InvalidInput("tree_series_gap: lambda must be positive");
  }
  const int n = base.n();
  const double lambda_eff = lambda / n;

  MeetingSolution sol = laplace_meeting(base, lambda_eff);
  SpectralDecomposition spec = eigendecompose(base);
  GreenEvaluation green = green_function(spec, lambda_eff, /*restricted=*/true);
  double paired = sol.place_transform.dot(green.values.diagonal());

  // Truncation depth: both the restricted-Green tail (driven by the realized
  // gap) and the tree-moment tail (driven by the Kesten-McKay spectral
  // radius) must fall below 1e-6.
  const double g = std::max(spectral_gap, 0.0);
  const double denom = lambda_eff + 2.0;
  const double tree_radius = 2.0 * std::sqrt(degree - 1.0) / degree;
  int depth = std::max(geometric_truncation(2.0 * (1.0 - g) / denom, 1e-6),
                       geometric_truncation(2.0 * tree_radius / denom, 1e-6));
  depth = std::min(depth, 20000);

  std::vector<double> probs = tree_return_probabilities(degree, depth);
  double series = 0.0;
  double factor = 1.0 / denom;  // 2^ell / (lambda_eff + 2)^{ell+1}
  for (int ell = 0; ell <= depth; ++ell) {
    series += probs[ell] * factor;
    factor *= 2.0 / denom;
  }
  return std::abs(paired - sol.laplace * series);
}

}  // namespace meetlab
