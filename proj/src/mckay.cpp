#include "meetlab/mckay.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "meetlab/errors.hpp"

namespace meetlab {

namespace {

using BigInt = boost::multiprecision::cpp_int;

void require_degree(int k) {
  if (k < 3) {
    throw InvalidInput(k == 2
                           ? "degree 2: resolvent sum diverges, k >= 3 required"
                           : "degree must be >= 3");
  }
}

// Composite Simpson with interval doubling until successive estimates agree.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
  double previous = 0.0;
  for (int panels = 64; panels <= (1 << 22); panels *= 2) {
    double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) {
      acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    double estimate = acc * h / 3.0;
    if (panels > 64 &&
        std::abs(estimate - previous) <=
            std::max(abs_tol, rel_tol * std::abs(estimate))) {
      return estimate;
    }
    previous = estimate;
  }
  throw NumericalFailure("quadrature did not converge to requested tolerance");
}

}  // namespace

double kesten_mckay_density(int k, double q) {
  require_degree(k);
  const double edge2 = 4.0 * (k - 1.0);
  if (std::abs(q) >= 2.0 * std::sqrt(k - 1.0)) return 0.0;
  return k * std::sqrt(edge2 - q * q) /
         (2.0 * std::numbers::pi * (double(k) * k - q * q));
}

TreeMoments moments_tree_dp(int k, int max_order) {
  require_degree(k);
  if (max_order < 0 || max_order > 60) {
    throw InvalidInput("moments_tree_dp: order must be in [0, 60]");
  }
  TreeMoments out;
  out.k = k;
  out.method = MomentMethod::TreeDp;
  out.moments.resize(max_order + 1, 0.0);
  // counts[d] = number of ell-step walks from the root ending at distance d.
  // From the root: k outward moves; from distance d >= 1: k-1 outward, 1 inward.
  std::vector<BigInt> counts(max_order + 2, 0);
  counts[0] = 1;
  BigInt k_pow = 1;
  out.moments[0] = 1.0;
  for (int ell = 1; ell <= max_order; ++ell) {
    std::vector<BigInt> next(max_order + 2, 0);
    next[1] += counts[0] * k;
    for (int d = 1; d <= ell; ++d) {
      if (counts[d] == 0) continue;
      next[d + 1] += counts[d] * (k - 1);
      next[d - 1] += counts[d];
    }
    counts = std::move(next);
    k_pow *= k;
    out.moments[ell] =
        boost::multiprecision::cpp_rational(counts[0], k_pow).convert_to<double>();
  }
  return out;
}

std::vector<double> tree_return_probabilities(int k, int max_order) {
  require_degree(k);
  if (max_order < 0) {
    throw InvalidInput("tree_return_probabilities: negative order");
  }
  // Probability version of the distance-chain DP; accurate to rounding,
  // which is ample for truncated series with ~1e-6 tails.
  std::vector<double> p(max_order + 2, 0.0);
  p[0] = 1.0;
  std::vector<double> out(max_order + 1, 0.0);
  out[0] = 1.0;
  const double up = (k - 1.0) / k;
  const double down = 1.0 / k;
  for (int ell = 1; ell <= max_order; ++ell) {
    std::vector<double> next(max_order + 2, 0.0);
    next[1] += p[0];
    for (int d = 1; d <= ell; ++d) {
      next[d + 1] += p[d] * up;
      next[d - 1] += p[d] * down;
    }
    p = std::move(next);
    out[ell] = p[0];
  }
  return out;
}

TreeMoments moments_quadrature(int k, int max_order) {
  require_degree(k);
  if (max_order < 0 || max_order > 60) {
    throw InvalidInput("moments_quadrature: order must be in [0, 60]");
  }
  TreeMoments out;
  out.k = k;
  out.method = MomentMethod::Quadrature;
  out.moments.resize(max_order + 1, 0.0);
  const double edge = 2.0 * std::sqrt(k - 1.0);
  const double half_pi = std::numbers::pi / 2.0;
  double k_pow = 1.0;
  for (int ell = 0; ell <= max_order; ++ell) {
    if (ell % 2 == 1) {
      out.moments[ell] = 0.0;  // odd moments vanish by symmetry
      k_pow *= k;
      continue;
    }
    auto integrand = [&](double theta) {
      double s = std::sin(theta);
      double c = std::cos(theta);
      double q = edge * s;
      double weight = k * edge * edge * c * c /
                      (2.0 * std::numbers::pi * (double(k) * k - q * q));
      return std::pow(q, ell) * weight;
    };
    double raw = integrate(integrand, -half_pi, half_pi, 1e-12, 1e-13 * std::pow(edge, ell));
    out.moments[ell] = raw / k_pow;
    k_pow *= k;
  }
  return out;
}

ResolventSum resolvent_sum(int k, int max_order) {
  require_degree(k);
  ResolventSum out;
  out.exact = (k - 1.0) / (k - 2.0);
  std::vector<double> probs = tree_return_probabilities(k, max_order);
  const double rho = 2.0 * std::sqrt(k - 1.0) / k;  // spectral radius of Q on the tree
  double acc = 0.0;
  for (int ell = 0; ell <= max_order; ++ell) {
    acc += probs[ell];
    out.partial.push_back(acc);
    out.tail_bound.push_back(std::pow(rho, ell + 1) / (1.0 - rho));
  }
  return out;
}

double limit_mean(int k) {
  if (k < 3) {
    throw InvalidInput("limit_mean: k >= 3 required");
  }
  return 0.5 * (k - 1.0) / (k - 2.0);
}

}  // namespace meetlab
