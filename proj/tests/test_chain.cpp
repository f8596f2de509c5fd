#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "meetlab/chain.hpp"
#include "meetlab/errors.hpp"
#include "meetlab/graph.hpp"

using namespace meetlab;

namespace {

std::vector<std::vector<int>> path_graph(int n) {
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i + 1 < n; ++i) {
    adj[i].push_back(i + 1);
    adj[i + 1].push_back(i);
  }
  return adj;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("kernel from K_4 adjacency") {
  TransitionKernel k4 = complete_graph(4).kernel();
  for (int x = 0; x < 4; ++x) {
    CHECK(k4.pi(x) == doctest::Approx(0.25).epsilon(1e-14));
    for (int y = 0; y < 4; ++y) {
      CHECK(k4.entries(x, y) == doctest::Approx(x == y ? 0.0 : 1.0 / 3.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("regular graph gets uniform stationary law") {
  TransitionKernel kernel = sample_regular(10, 3, 7).kernel();
  for (int x = 0; x < 10; ++x) {
    CHECK(kernel.pi(x) == doctest::Approx(0.1).epsilon(1e-14));
  }
}

TEST_CASE("path graph stationary law is degree-proportional") {
  TransitionKernel kernel = kernel_from_graph(path_graph(3));
  CHECK(kernel.pi(0) == doctest::Approx(0.25));
  CHECK(kernel.pi(1) == doctest::Approx(0.5));
  CHECK(kernel.pi(2) == doctest::Approx(0.25));
  // independent oracle: pi Q = pi
  Eigen::VectorXd residual = kernel.entries.transpose() * kernel.pi - kernel.pi;
  CHECK(residual.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("kernel rejects bad adjacency") {
  // disconnected: two 2-paths
  std::vector<std::vector<int>> disconnected{{1}, {0}, {3}, {2}};
  CHECK_THROWS_AS(kernel_from_graph(disconnected), InvalidInput);
  std::vector<std::vector<int>> loop{{0, 1}, {0}};
  CHECK_THROWS_AS(kernel_from_graph(loop), InvalidInput);
  std::vector<std::vector<int>> multi{{1, 1}, {0, 0}};
  CHECK_THROWS_AS(kernel_from_graph(multi), InvalidInput);
}

TEST_CASE("from_entries recovers the stationary law") {
  TransitionKernel reference = kernel_from_graph(path_graph(5));
  TransitionKernel derived = TransitionKernel::from_entries(reference.entries);
  CHECK((derived.pi - reference.pi).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("symmetrize is the identity on symmetric kernels") {
  TransitionKernel kernel = build_torus(1, 6).kernel();
  CHECK(max_abs(symmetrize(kernel) - kernel.entries) <= 1e-14);
}

TEST_CASE("symmetrize of the 3-path has 1/sqrt(2) couplings") {
  Eigen::MatrixXd s = symmetrize(kernel_from_graph(path_graph(3)));
  CHECK(s(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(s(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(max_abs(s - s.transpose()) <= 1e-12);
}

TEST_CASE("sigma(S) equals sigma(Q) for reversible kernels") {
  TransitionKernel kernel = kernel_from_graph(path_graph(4));
  SpectralDecomposition spec = eigendecompose(kernel);
  // direct nonsymmetric eigensolve of Q as the oracle
  Eigen::EigenSolver<Eigen::MatrixXd> direct(kernel.entries);
  std::vector<double> direct_vals;
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(direct.eigenvalues()(i).imag()) <= 1e-10);
    direct_vals.push_back(direct.eigenvalues()(i).real());
  }
  std::sort(direct_vals.begin(), direct_vals.end(), std::greater<>());
  for (int i = 0; i < 4; ++i) {
    CHECK(spec.eigenvalues(i) == doctest::Approx(direct_vals[i]).epsilon(1e-10));
  }
}

TEST_CASE("K_4 walk spectrum is {1, -1/3, -1/3, -1/3}") {
  SpectralDecomposition spec = eigendecompose(complete_graph(4).kernel());
  CHECK(spec.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) {
    CHECK(spec.eigenvalues(i) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("even cycle spectrum is symmetric about zero") {
  SpectralDecomposition spec = eigendecompose(build_torus(1, 8).kernel());
  Eigen::VectorXd reversed = spec.eigenvalues.reverse();
  CHECK((spec.eigenvalues + reversed).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("Z_4^3 torus eigenvalues match the cosine closed form") {
  SpectralDecomposition spec = eigendecompose(build_torus(3, 4).kernel());
  std::vector<double> expected;
  for (int j1 = 0; j1 < 4; ++j1)
    for (int j2 = 0; j2 < 4; ++j2)
      for (int j3 = 0; j3 < 4; ++j3)
        expected.push_back((std::cos(2 * std::numbers::pi * j1 / 4) +
                            std::cos(2 * std::numbers::pi * j2 / 4) +
                            std::cos(2 * std::numbers::pi * j3 / 4)) /
                           3.0);
  std::sort(expected.begin(), expected.end(), std::greater<>());
  for (int i = 0; i < 64; ++i) {
    CHECK(spec.eigenvalues(i) == doctest::Approx(expected[i]).epsilon(1e-9));
  }
}

TEST_CASE("spectral decomposition invariants") {
  TransitionKernel kernel = sample_regular(12, 3, 3).kernel();
  SpectralDecomposition spec = eigendecompose(kernel);
  const int n = kernel.n();

  CHECK(spec.eigenvalues.maxCoeff() <= 1.0 + 1e-10);
  CHECK(spec.eigenvalues.minCoeff() >= -1.0 - 1e-10);
  CHECK(max_abs(spec.eigenvectors.transpose() * spec.eigenvectors -
                Eigen::MatrixXd::Identity(n, n)) <= 1e-10);

  // reconstruction of S
  Eigen::MatrixXd s = symmetrize(kernel);
  Eigen::MatrixXd rebuilt = spec.eigenvectors * spec.eigenvalues.asDiagonal() *
                            spec.eigenvectors.transpose();
  CHECK(max_abs(rebuilt - s) <= 1e-8);

  // top eigenvector is pi^{1/2} up to sign
  Eigen::VectorXd top = spec.eigenvectors.col(0);
  double aligned = std::min((top - spec.pi_sqrt).cwiseAbs().maxCoeff(),
                            (top + spec.pi_sqrt).cwiseAbs().maxCoeff());
  CHECK(aligned <= 1e-8);
}

TEST_CASE("dense eigensolve budget is enforced") {
  TransitionKernel kernel = complete_graph(8).kernel();
  CHECK_THROWS_AS(eigendecompose(kernel, 4), InvalidInput);
}

TEST_CASE("apply_function basics") {
  TransitionKernel kernel = kernel_from_graph(path_graph(4));
  SpectralDecomposition spec = eigendecompose(kernel);
  const int n = 4;

  CHECK(max_abs(apply_function(spec, [](double) { return 1.0; }) -
                Eigen::MatrixXd::Identity(n, n)) <= 1e-12);

  // f(q) = q^3 against repeated multiplication
  Eigen::MatrixXd cubed = kernel.entries * kernel.entries * kernel.entries;
  CHECK(max_abs(apply_function(spec, [](double q) { return q * q * q; }) - cubed) <=
        1e-10);

  CHECK_THROWS_AS(apply_function(spec, [](double q) { return 1.0 / (q - 1.0); }),
                  SingularityError);
}

TEST_CASE("eigenvalue-1 indicator has constant diagonal 1/N on regular graphs") {
  TransitionKernel kernel = sample_regular(14, 3, 11).kernel();
  SpectralDecomposition spec = eigendecompose(kernel);
  Eigen::MatrixXd projector =
      apply_function(spec, [](double q) { return q > 1.0 - 1e-8 ? 1.0 : 0.0; });
  for (int x = 0; x < 14; ++x) {
    CHECK(projector(x, x) == doctest::Approx(1.0 / 14.0).epsilon(1e-10));
  }
}

TEST_CASE("functional calculus is multiplicative on random polynomials") {
  TransitionKernel kernel = kernel_from_graph(path_graph(5));
  SpectralDecomposition spec = eigendecompose(kernel);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::array<double, 6> a{}, b{};
    for (auto& c : a) c = coeff(rng);
    for (auto& c : b) c = coeff(rng);
    auto poly = [](const std::array<double, 6>& c, double q) {
      double acc = 0.0;
      for (int i = 5; i >= 0; --i) acc = acc * q + c[i];
      return acc;
    };
    auto f = [&](double q) { return poly(a, q); };
    auto g = [&](double q) { return poly(b, q); };
    auto fg = [&](double q) { return f(q) * g(q); };
    Eigen::MatrixXd lhs = apply_function(spec, fg);
    Eigen::MatrixXd rhs = apply_function(spec, f) * apply_function(spec, g);
    CHECK(max_abs(lhs - rhs) <= 1e-9);
    // linearity
    Eigen::MatrixXd sum_applied =
        apply_function(spec, [&](double q) { return f(q) + g(q); });
    CHECK(max_abs(sum_applied - apply_function(spec, f) - apply_function(spec, g)) <=
          1e-12);
  }
}

TEST_CASE("heat kernel") {
  TransitionKernel k4 = complete_graph(4).kernel();
  SpectralDecomposition spec = eigendecompose(k4);

  CHECK(max_abs(heat_kernel(spec, 0.0) - Eigen::MatrixXd::Identity(4, 4)) <= 1e-12);

  // truncated Poisson series oracle at t = 1
  Eigen::MatrixXd series = Eigen::MatrixXd::Zero(4, 4);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(4, 4);
  double weight = std::exp(-1.0);
  for (int ell = 0; ell <= 50; ++ell) {
    series += weight * power;
    power = (power * k4.entries).eval();
    weight /= (ell + 1);
  }
  CHECK(max_abs(heat_kernel(spec, 1.0) - series) <= 1e-10);

  // ergodic limit
  Eigen::MatrixXd late = heat_kernel(spec, 100.0);
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      CHECK(late(x, y) == doctest::Approx(0.25).epsilon(1e-8));
    }
  }
  // rows sum to 1
  TransitionKernel path = kernel_from_graph(path_graph(5));
  Eigen::MatrixXd qt = heat_kernel(eigendecompose(path), 0.7);
  for (int x = 0; x < 5; ++x) {
    CHECK(qt.row(x).sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(heat_kernel(spec, -0.1), InvalidInput);
}

TEST_CASE("heat kernel semigroup property") {
  TransitionKernel kernel = sample_regular(10, 3, 5).kernel();
  SpectralDecomposition spec = eigendecompose(kernel);
  const double grid[] = {0.3, 1.0, 2.7};
  for (double s : grid) {
    for (double t : grid) {
      Eigen::MatrixXd lhs = heat_kernel(spec, s) * heat_kernel(spec, t);
      CHECK(max_abs(lhs - heat_kernel(spec, s + t)) <= 1e-9);
    }
  }
}

TEST_CASE("green function matches the time-quadrature oracle") {
  // general reversible (non-symmetric) kernel
  TransitionKernel kernel = kernel_from_graph(path_graph(4));
  SpectralDecomposition spec = eigendecompose(kernel);
  const double lambda = 1.0;
  GreenEvaluation green = green_function(spec, lambda, false);

  // Simpson quadrature of int e^{-lambda t} sum_z Q_t(x,z) Q_t(y,z) dt
  const double horizon = 60.0;
  const int steps = 6000;
  const double h = horizon / steps;
  Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i <= steps; ++i) {
    double t = i * h;
    double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    Eigen::MatrixXd qt = heat_kernel(spec, t);
    quad += w * std::exp(-lambda * t) * qt * qt.transpose();
  }
  quad *= h / 3.0;
  CHECK(max_abs(green.values - quad) <= 1e-7);
}

TEST_CASE("green resolvent identity for symmetric kernels") {
  TransitionKernel kernel = sample_regular(16, 4, 2).kernel();
  SpectralDecomposition spec = eigendecompose(kernel);
  for (double lambda : {0.1, 1.0, 10.0}) {
    GreenEvaluation green = green_function(spec, lambda, false);
    Eigen::MatrixXd op = lambda * Eigen::MatrixXd::Identity(16, 16) +
                         2.0 * (Eigen::MatrixXd::Identity(16, 16) - kernel.entries);
    CHECK(max_abs(op * green.values - Eigen::MatrixXd::Identity(16, 16)) <= 1e-9);
    CHECK(max_abs(green.values - green.values.transpose()) <= 1e-10);
  }
}

TEST_CASE("restricted green drops exactly the rank-one stationary term") {
  TransitionKernel kernel = build_torus(1, 6).kernel();
  SpectralDecomposition spec = eigendecompose(kernel);
  const double lambda = 0.8;
  GreenEvaluation full = green_function(spec, lambda, false);
  GreenEvaluation restricted = green_function(spec, lambda, true);
  for (int x = 0; x < 6; ++x) {
    CHECK(full.values(x, x) - restricted.values(x, x) ==
          doctest::Approx(1.0 / (lambda * 6)).epsilon(1e-12));
  }
  // restricted form admits lambda = 0
  CHECK_NOTHROW(green_function(spec, 0.0, true));
  CHECK_THROWS_AS(green_function(spec, 0.0, false), SingularityError);
}

TEST_CASE("green diagonal is constant on tori") {
  SpectralDecomposition spec = eigendecompose(build_torus(2, 4).kernel());
  GreenEvaluation green = green_function(spec, 1.3, false);
  Eigen::VectorXd diag = green.values.diagonal();
  CHECK(diag.maxCoeff() - diag.minCoeff() <= 1e-10);
}

TEST_CASE("extremal eigenvalues agree with the dense solve") {
  RegularGraph graph = sample_regular(40, 3, 9);
  TransitionKernel kernel = graph.kernel();
  SpectralDecomposition spec = eigendecompose(kernel);
  MatVec apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return kernel.entries * v;
  };
  ExtremalEigenvalues ext = extremal_eigenvalues(40, apply);
  CHECK(ext.lambda2 == doctest::Approx(spec.eigenvalues(1)).epsilon(1e-7));
  CHECK(ext.lambda_min == doctest::Approx(spec.eigenvalues(39)).epsilon(1e-7));
}
