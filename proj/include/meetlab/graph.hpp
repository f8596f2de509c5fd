#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "meetlab/chain.hpp"

namespace meetlab {

/// Simple k-regular graph (also used for reference graphs: cycles, tori,
/// complete graphs). Immutable after construction.
struct RegularGraph {
  int n = 0;
  int k = 0;
  std::vector<std::vector<int>> adj;  // per-vertex sorted neighbor lists
  std::uint64_t seed = 0;             // 0 for deterministic constructions

  TransitionKernel kernel() const { return kernel_from_graph(adj); }
};

/// Uniform simple k-regular graph via the pairing (configuration) model with
/// rejection of loops and multi-edges. Deterministic given the seed.
RegularGraph sample_regular(int n, int k, std::uint64_t seed,
                            int max_attempts = 1000000);

/// Nearest-neighbor torus Z_m^d; 2d-regular on m^d vertices. Requires m >= 3.
RegularGraph build_torus(int d, int m);

RegularGraph complete_graph(int n);

bool is_connected(const RegularGraph& graph);

struct CycleCensus {
  int r_max = 0;
  std::map<int, long long> counts;  // r -> number of r-cycles, 3 <= r <= r_max
};

/// Exact count of distinct unoriented, unrooted simple cycles of each length
/// up to r_max. Capped at r_max <= 8; longer censuses blow up combinatorially.
CycleCensus count_cycles(const RegularGraph& graph, int r_max);

struct GapReport {
  double lambda2 = 1.0;
  double lambda_min = -1.0;
  double g = 0.0;  // realized gap min(1 - lambda2, 1 - |lambda_min|)
  bool connected = false;
  bool passes = false;
};

/// Extreme eigenvalues of Q = adjacency/k and the realized spectral gap.
/// Disconnectedness is reported (lambda2 = 1, passes = false), not thrown.
GapReport gap_check(const RegularGraph& graph, double g0);

struct ConstancyEntry {
  int ell = 0;
  bool constant = false;   // Q^ell(x,x) constant over x within 1e-12
  double modal_value = 0.0;
  double modal_fraction = 0.0;  // fraction of vertices matching the mode
};

/// Checks constancy of the diagonal of Q^ell for each ell <= ell_max.
std::vector<ConstancyEntry> constancy_check(const TransitionKernel& kernel,
                                            int ell_max);

}  // namespace meetlab
