#include "meetlab/chain.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <deque>
#include <sstream>

#include "meetlab/errors.hpp"
#include "meetlab/rng.hpp"

namespace meetlab {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kReversibilityTol = 1e-12;
constexpr double kEigenRangeTol = 1e-10;
constexpr double kTopGapThreshold = 1e-8;

bool support_connected(const Eigen::MatrixXd& q) {
  const int n = static_cast<int>(q.rows());
  std::vector<char> seen(n, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int y = 0; y < n; ++y) {
      if (!seen[y] && (q(x, y) > 0.0 || q(y, x) > 0.0)) {
        seen[y] = 1;
        ++reached;
        queue.push_back(y);
      }
    }
  }
  return reached == n;
}

void validate(const Eigen::MatrixXd& q, const Eigen::VectorXd& pi) {
  const int n = static_cast<int>(q.rows());
  if (n == 0 || q.cols() != n || pi.size() != n) {
    throw InvalidInput("transition kernel: shape mismatch");
  }
  for (int x = 0; x < n; ++x) {
    if (q(x, x) != 0.0) {
      throw InvalidInput("transition kernel: nonzero trace at state " +
                         std::to_string(x));
    }
    if (std::abs(q.row(x).sum() - 1.0) > kRowSumTol) {
      throw InvalidInput("transition kernel: row " + std::to_string(x) +
                         " does not sum to 1");
    }
    for (int y = 0; y < n; ++y) {
      if (q(x, y) < 0.0) {
        throw InvalidInput("transition kernel: negative entry");
      }
    }
  }
  if (pi.minCoeff() <= 0.0 || std::abs(pi.sum() - 1.0) > kRowSumTol) {
    throw InvalidInput("transition kernel: pi is not a positive probability vector");
  }
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      if (std::abs(pi(x) * q(x, y) - pi(y) * q(y, x)) > kReversibilityTol) {
        throw InvalidInput("transition kernel: detailed balance fails at (" +
                           std::to_string(x) + "," + std::to_string(y) + ")");
      }
    }
  }
  if (!support_connected(q)) {
    throw InvalidInput("transition kernel: support is not irreducible");
  }
}

}  // namespace

bool TransitionKernel::is_symmetric(double tol) const {
  return (entries - entries.transpose()).cwiseAbs().maxCoeff() <= tol;
}

TransitionKernel TransitionKernel::create(Eigen::MatrixXd entries,
                                          Eigen::VectorXd pi) {
  validate(entries, pi);
  TransitionKernel kernel;
  kernel.entries = std::move(entries);
  kernel.pi = std::move(pi);
  return kernel;
}

TransitionKernel TransitionKernel::from_entries(const Eigen::MatrixXd& entries) {
  const int n = static_cast<int>(entries.rows());
  if (n == 0) {
    throw InvalidInput("transition kernel: empty matrix");
  }
  // Power iteration on the lazy chain (I+Q)/2; laziness removes periodicity.
  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int iter = 0; iter < 200000; ++iter) {
    Eigen::VectorXd next = 0.5 * (p + entries.transpose() * p);
    next /= next.sum();
    double delta = (next - p).cwiseAbs().maxCoeff();
    p = next;
    if (delta < 1e-15) break;
  }
  return create(entries, p);
}

TransitionKernel kernel_from_graph(const std::vector<std::vector<int>>& neighbors) {
  const int n = static_cast<int>(neighbors.size());
  if (n < 2) {
    throw InvalidInput("kernel_from_graph: need at least two vertices");
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  double total_degree = 0.0;
  for (int x = 0; x < n; ++x) {
    const auto& nbrs = neighbors[x];
    if (nbrs.empty()) {
      throw InvalidInput("kernel_from_graph: isolated vertex " + std::to_string(x));
    }
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      int y = nbrs[i];
      if (y < 0 || y >= n) {
        throw InvalidInput("kernel_from_graph: neighbor index out of range");
      }
      if (y == x) {
        throw InvalidInput("kernel_from_graph: self-loop at vertex " + std::to_string(x));
      }
      if (q(x, y) != 0.0) {
        throw InvalidInput("kernel_from_graph: multi-edge at (" + std::to_string(x) +
                           "," + std::to_string(y) + ")");
      }
      q(x, y) = 1.0;
    }
    total_degree += static_cast<double>(nbrs.size());
  }
  if ((q - q.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw InvalidInput("kernel_from_graph: adjacency is not symmetric");
  }
  Eigen::VectorXd pi(n);
  for (int x = 0; x < n; ++x) {
    double deg = static_cast<double>(neighbors[x].size());
    q.row(x) /= deg;
    pi(x) = deg / total_degree;
  }
  return TransitionKernel::create(std::move(q), std::move(pi));
}

Eigen::MatrixXd symmetrize(const TransitionKernel& kernel) {
  const Eigen::VectorXd sqrt_pi = kernel.pi.cwiseSqrt();
  Eigen::MatrixXd s = sqrt_pi.asDiagonal() * kernel.entries *
                      sqrt_pi.cwiseInverse().asDiagonal();
  // Detailed balance makes s symmetric up to rounding; average the halves
  // so the eigensolver sees an exactly symmetric matrix.
  s = 0.5 * (s + s.transpose()).eval();
  return s;
}

SpectralDecomposition eigendecompose(const TransitionKernel& kernel, int max_dense) {
  const int n = kernel.n();
  if (n > max_dense) {
    throw InvalidInput("eigendecompose: " + std::to_string(n) +
                       " states exceeds dense budget " + std::to_string(max_dense));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrize(kernel));
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("eigendecompose: symmetric eigensolver did not converge (n=" +
                           std::to_string(n) + ")");
  }
  SpectralDecomposition spec;
  spec.pi = kernel.pi;
  spec.pi_sqrt = kernel.pi.cwiseSqrt();
  spec.eigenvalues = solver.eigenvalues().reverse();
  spec.eigenvectors = solver.eigenvectors().rowwise().reverse();
  if (spec.eigenvalues(0) < 1.0 - kEigenRangeTol ||
      spec.eigenvalues(0) > 1.0 + kEigenRangeTol ||
      spec.eigenvalues(n - 1) < -1.0 - kEigenRangeTol) {
    throw NumericalFailure("eigendecompose: spectrum escapes [-1,1]");
  }
  // the top eigenvalue is exactly 1 for any stochastic kernel; snapping it
  // keeps indicator-style functions of the spectrum honest
  spec.eigenvalues(0) = 1.0;
  if (n > 1 && spec.eigenvalues(0) - spec.eigenvalues(1) < kTopGapThreshold) {
    spec.gap_warning = true;
  }
  return spec;
}

Eigen::MatrixXd apply_function(const SpectralDecomposition& spec,
                               const std::function<double(double)>& f) {
  const int n = spec.n();
  Eigen::VectorXd fvals(n);
  for (int i = 0; i < n; ++i) {
    double v = f(spec.eigenvalues(i));
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "apply_function: f is not finite at eigenvalue " << spec.eigenvalues(i);
      throw SingularityError(msg.str());
    }
    fvals(i) = v;
  }
  Eigen::MatrixXd f_of_s =
      spec.eigenvectors * fvals.asDiagonal() * spec.eigenvectors.transpose();
  return spec.pi_sqrt.cwiseInverse().asDiagonal() * f_of_s *
         spec.pi_sqrt.asDiagonal();
}

Eigen::MatrixXd heat_kernel(const SpectralDecomposition& spec, double t) {
  if (t < 0.0) {
    throw InvalidInput("heat_kernel: negative time");
  }
  return apply_function(spec, [t](double q) { return std::exp(t * (q - 1.0)); });
}

GreenEvaluation green_function(const SpectralDecomposition& spec, double lambda,
                               bool restricted) {
  if (!restricted && lambda <= 0.0) {
    throw SingularityError("green_function: lambda must be positive unless restricted");
  }
  if (restricted && lambda < 0.0) {
    throw InvalidInput("green_function: negative lambda");
  }
  const int n = spec.n();
  // Two-sided spectral sum of the defining time integral:
  //   G(x,y) = pi(x)^{-1/2} pi(y)^{-1/2} [Phi (W o K) Phi^T](x,y)
  // with W = Phi^T diag(pi) Phi and K(q,q') = 1/(lambda + 2 - q - q').
  // For symmetric kernels W is diagonal and this reduces to the resolvent
  // 1/(lambda + 2(1-Q)).
  Eigen::MatrixXd w = spec.eigenvectors.transpose() * spec.pi.asDiagonal() *
                      spec.eigenvectors;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      w(i, j) /= lambda + 2.0 - spec.eigenvalues(i) - spec.eigenvalues(j);
    }
  }
  if (restricted) {
    w(0, 0) = 0.0;  // drop the eigenvalue-1 component
  }
  GreenEvaluation out;
  out.lambda = lambda;
  out.restricted = restricted;
  out.values = spec.pi_sqrt.cwiseInverse().asDiagonal() *
               (spec.eigenvectors * w * spec.eigenvectors.transpose()) *
               spec.pi_sqrt.cwiseInverse().asDiagonal();
  return out;
}

namespace {

// Largest eigenvalue of v -> apply(v) restricted to the complement of
// `deflate` (unit vector), for a symmetric positive-shifted operator.
double deflated_power(int n, const MatVec& apply, const Eigen::VectorXd& deflate,
                      double tol, int max_iter) {
  std::mt19937_64 rng(0x5eed5eedULL);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform_unit(rng) - 0.5;
  v -= deflate * deflate.dot(v);
  v.normalize();
  double value = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd next = apply(v);
    next -= deflate * deflate.dot(next);
    double norm = next.norm();
    if (norm == 0.0) return 0.0;
    next /= norm;
    double next_value = next.dot(apply(next));
    bool done = std::abs(next_value - value) < tol * std::max(1.0, std::abs(next_value));
    value = next_value;
    v = next;
    if (done && iter > 20) return value;
  }
  throw NumericalFailure("extremal_eigenvalues: power iteration did not converge in " +
                         std::to_string(max_iter) + " iterations");
}

}  // namespace

ExtremalEigenvalues extremal_eigenvalues(int n, const MatVec& apply_q, double tol,
                                         int max_iter) {
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  // Q + I has spectrum in [0,2]; its deflated top is lambda2 + 1.
  MatVec shifted_up = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return apply_q(v) + v;
  };
  // I - Q has spectrum in [0,2]; its (undeflated) top is 1 - lambda_min.
  MatVec shifted_down = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - apply_q(v);
  };
  ExtremalEigenvalues out;
  out.lambda2 = deflated_power(n, shifted_up, uniform, tol, max_iter) - 1.0;
  out.lambda_min =
      1.0 - deflated_power(n, shifted_down, Eigen::VectorXd::Zero(n), tol, max_iter);
  return out;
}

}  // namespace meetlab
