#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "meetlab/errors.hpp"
#include "meetlab/mckay.hpp"

using namespace meetlab;

TEST_CASE("density vanishes at and beyond the support boundary") {
  for (int k : {3, 4, 5}) {
    double edge = 2.0 * std::sqrt(k - 1.0);
    CHECK(kesten_mckay_density(k, edge) == 0.0);
    CHECK(kesten_mckay_density(k, -edge) == 0.0);
    CHECK(kesten_mckay_density(k, edge + 1.0) == 0.0);
    CHECK(kesten_mckay_density(k, 0.0) > 0.0);
  }
}

TEST_CASE("density at the origin for k=3") {
  CHECK(kesten_mckay_density(3, 0.0) ==
        doctest::Approx(std::sqrt(8.0) / (6.0 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("density integrates to one") {
  // the zeroth quadrature moment is exactly the normalization integral
  for (int k : {3, 6}) {
    CHECK(moments_quadrature(k, 0).moments[0] == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("hand-counted low-order tree moments") {
  for (int k : {3, 4, 5}) {
    TreeMoments dp = moments_tree_dp(k, 4);
    CHECK(dp.moments[0] == 1.0);
    CHECK(dp.moments[1] == 0.0);
    CHECK(dp.moments[2] == doctest::Approx(1.0 / k).epsilon(1e-14));
    CHECK(dp.moments[3] == 0.0);
    CHECK(dp.moments[4] ==
          doctest::Approx((2.0 * k - 1.0) / (double(k) * k * k)).epsilon(1e-14));
  }
  CHECK(moments_tree_dp(3, 4).moments[2] == doctest::Approx(1.0 / 3.0));
  CHECK(moments_tree_dp(3, 4).moments[4] == doctest::Approx(5.0 / 27.0));
}

TEST_CASE("quadrature and tree DP agree to 1e-8 through order 40") {
  for (int k : {3, 4, 5, 6}) {
    TreeMoments dp = moments_tree_dp(k, 40);
    TreeMoments quad = moments_quadrature(k, 40);
    for (int ell = 0; ell <= 40; ++ell) {
      CHECK(std::abs(dp.moments[ell] - quad.moments[ell]) <= 1e-8);
    }
  }
}

TEST_CASE("moment growth bound from the spectral radius") {
  for (int k : {3, 4, 5, 6}) {
    double rho = 2.0 * std::sqrt(k - 1.0) / k;
    TreeMoments dp = moments_tree_dp(k, 40);
    for (int ell = 0; ell <= 40; ++ell) {
      CHECK(dp.moments[ell] >= 0.0);
      CHECK(dp.moments[ell] <= std::pow(rho, ell) + 1e-15);
    }
  }
}

TEST_CASE("double-precision DP tracks the exact DP") {
  std::vector<double> probs = tree_return_probabilities(3, 40);
  TreeMoments dp = moments_tree_dp(3, 40);
  for (int ell = 0; ell <= 40; ++ell) {
    CHECK(std::abs(probs[ell] - dp.moments[ell]) <= 1e-13);
  }
}

TEST_CASE("order cap on the moment operations") {
  CHECK_THROWS_AS(moments_tree_dp(3, 61), InvalidInput);
  CHECK_THROWS_AS(moments_quadrature(3, 61), InvalidInput);
}

TEST_CASE("half-line DP degenerates to weighted Catalan numbers") {
  // with k-1 upward branches from every level (including the root) and a
  // single downward edge, closed 2m-walks staying nonnegative are Dyck paths
  // carrying weight (k-1)^m
  const int k = 3;
  const long long catalan[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430};
  const int max_order = 16;
  std::vector<long long> counts(max_order + 2, 0);
  counts[0] = 1;
  for (int ell = 1; ell <= max_order; ++ell) {
    std::vector<long long> next(max_order + 2, 0);
    for (int d = 0; d <= ell; ++d) {
      next[d + 1] += counts[d] * (k - 1);
      if (d > 0) next[d - 1] += counts[d];
    }
    counts = next;
    if (ell % 2 == 0) {
      int m = ell / 2;
      long long expected = catalan[m];
      for (int i = 0; i < m; ++i) expected *= (k - 1);
      CHECK(counts[0] == expected);
    }
  }
}

TEST_CASE("resolvent sum closed forms") {
  CHECK(resolvent_sum(3).exact == doctest::Approx(2.0));
  CHECK(resolvent_sum(4).exact == doctest::Approx(1.5));
  CHECK(resolvent_sum(5).exact == doctest::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(resolvent_sum(2), InvalidInput);
}

TEST_CASE("partial sums increase and bracket the exact value") {
  for (int k : {3, 4, 5, 6}) {
    ResolventSum sum = resolvent_sum(k, 40);
    for (std::size_t i = 1; i < sum.partial.size(); ++i) {
      CHECK(sum.partial[i] >= sum.partial[i - 1]);
      CHECK(sum.partial[i] <= sum.exact + 1e-12);
    }
    for (std::size_t i = 0; i < sum.partial.size(); ++i) {
      CHECK(sum.partial[i] + sum.tail_bound[i] >= sum.exact - 1e-12);
    }
  }
  // realized truncation error at L=40 for k=3, frozen from the exact DP
  ResolventSum k3 = resolvent_sum(3, 40);
  CHECK(k3.exact - k3.partial.back() == doctest::Approx(0.0129020590).epsilon(1e-6));
}

TEST_CASE("limiting scaled meeting-time means") {
  CHECK(limit_mean(3) == doctest::Approx(1.0));
  CHECK(limit_mean(4) == doctest::Approx(0.75));
  CHECK(limit_mean(1000) == doctest::Approx(0.5005004).epsilon(1e-6));
  CHECK_THROWS_AS(limit_mean(2), InvalidInput);
}
