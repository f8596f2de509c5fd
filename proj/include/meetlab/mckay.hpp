#pragma once

#include <vector>

namespace meetlab {

/// Kesten-McKay spectral density of the k-regular tree adjacency operator,
/// supported on (-2 sqrt(k-1), 2 sqrt(k-1)).
double kesten_mckay_density(int k, double q);

enum class MomentMethod { TreeDp, Quadrature };

/// Return probabilities Q^{(inf),ell} of the walk on the infinite k-regular
/// tree, ell = 0..L.
struct TreeMoments {
  int k = 0;
  MomentMethod method = MomentMethod::TreeDp;
  std::vector<double> moments;  // index ell
};

/// Exact integer count of closed ell-walks from the root of the infinite
/// k-regular tree (distance-chain dynamic program), divided by k^ell.
TreeMoments moments_tree_dp(int k, int max_order);

/// Same moments through the Kesten-McKay density: Q^{(inf),ell} =
/// k^{-ell} int q^ell mu_k(dq), with the endpoint singularity removed by the
/// substitution q = 2 sqrt(k-1) sin(theta).
TreeMoments moments_quadrature(int k, int max_order);

/// Return probabilities in plain double precision without the order cap;
/// used for long truncated series where only ~1e-12 accuracy is needed.
std::vector<double> tree_return_probabilities(int k, int max_order);

struct ResolventSum {
  double exact = 0.0;               // (k-1)/(k-2)
  std::vector<double> partial;      // partial sums of Q^{(inf),ell} up to L
  std::vector<double> tail_bound;   // geometric tail bound after each L
};

/// Sum over ell of Q^{(inf),ell}; the infinite-tree analogue of Kemeny's
/// constant. Diverges for k = 2.
ResolventSum resolvent_sum(int k, int max_order = 60);

/// Limiting mean of M/N on random k-regular graphs: (k-1)/(2(k-2)).
double limit_mean(int k);

}  // namespace meetlab
