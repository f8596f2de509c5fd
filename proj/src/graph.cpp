#include "meetlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <string>

#include "meetlab/errors.hpp"
#include "meetlab/rng.hpp"

namespace meetlab {

namespace {

void sort_adjacency(RegularGraph& graph) {
  for (auto& nbrs : graph.adj) {
    std::sort(nbrs.begin(), nbrs.end());
  }
}

}  // namespace

RegularGraph sample_regular(int n, int k, std::uint64_t seed, int max_attempts) {
  if (n < 1 || k < 2) {
    throw InvalidInput("sample_regular: need n >= 1 and k >= 2");
  }
  if (k > n - 1) {
    throw InvalidInput("sample_regular: degree " + std::to_string(k) +
                       " exceeds n-1 = " + std::to_string(n - 1));
  }
  if ((static_cast<long long>(n) * k) % 2 != 0) {
    throw InvalidInput("sample_regular: kN is odd, no k-regular graph exists");
  }

  std::mt19937_64 rng = make_engine(seed);
  std::vector<int> stubs(static_cast<std::size_t>(n) * k);
  for (int v = 0; v < n; ++v) {
    std::fill_n(stubs.begin() + static_cast<std::size_t>(v) * k, k, v);
  }

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    // Fisher-Yates over all stubs; pair consecutive stubs afterward.
    for (std::size_t i = stubs.size() - 1; i > 0; --i) {
      std::size_t j = uniform_below(rng, static_cast<std::uint32_t>(i + 1));
      std::swap(stubs[i], stubs[j]);
    }
    std::vector<std::set<int>> nbrs(n);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < stubs.size() && ok; i += 2) {
      int u = stubs[i];
      int v = stubs[i + 1];
      if (u == v || !nbrs[u].insert(v).second) {
        ok = false;  // loop or multi-edge: reject the whole matching
      } else {
        nbrs[v].insert(u);
      }
    }
    if (!ok) continue;

    RegularGraph graph;
    graph.n = n;
    graph.k = k;
    graph.seed = seed;
    graph.adj.resize(n);
    for (int v = 0; v < n; ++v) {
      graph.adj[v].assign(nbrs[v].begin(), nbrs[v].end());
    }
    return graph;
  }
  throw NumericalFailure("sample_regular: rejection budget of " +
                         std::to_string(max_attempts) + " attempts exhausted");
}

RegularGraph build_torus(int d, int m) {
  if (d < 1) {
    throw InvalidInput("build_torus: dimension must be >= 1");
  }
  if (m < 3) {
    throw InvalidInput("build_torus: side must be >= 3 to avoid multi-edges");
  }
  long long total = 1;
  for (int i = 0; i < d; ++i) {
    total *= m;
    if (total > 1000000) {
      throw InvalidInput("build_torus: torus too large");
    }
  }
  const int n = static_cast<int>(total);
  RegularGraph graph;
  graph.n = n;
  graph.k = 2 * d;
  graph.adj.resize(n);
  std::vector<long long> stride(d);
  stride[0] = 1;
  for (int i = 1; i < d; ++i) stride[i] = stride[i - 1] * m;
  for (int x = 0; x < n; ++x) {
    for (int i = 0; i < d; ++i) {
      int c = static_cast<int>((x / stride[i]) % m);
      int up = static_cast<int>(x + ((c + 1) % m - c) * stride[i]);
      int down = static_cast<int>(x + ((c + m - 1) % m - c) * stride[i]);
      graph.adj[x].push_back(up);
      graph.adj[x].push_back(down);
    }
  }
  sort_adjacency(graph);
  return graph;
}

RegularGraph complete_graph(int n) {
  if (n < 2) {
    throw InvalidInput("complete_graph: need n >= 2");
  }
  RegularGraph graph;
  graph.n = n;
  graph.k = n - 1;
  graph.adj.resize(n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (y != x) graph.adj[x].push_back(y);
    }
  }
  return graph;
}

bool is_connected(const RegularGraph& graph) {
  if (graph.n == 0) return false;
  std::vector<char> seen(graph.n, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (int y : graph.adj[x]) {
      if (!seen[y]) {
        seen[y] = 1;
        ++reached;
        queue.push_back(y);
      }
    }
  }
  return reached == graph.n;
}

namespace {

// Counts cycles through `start` as the smallest vertex. Orientation is fixed
// by requiring first neighbor < last neighbor on the closing step.
void cycle_dfs(const RegularGraph& graph, int start, int current, int first,
               int depth, int r_max, std::vector<char>& on_path,
               std::map<int, long long>& counts) {
  for (int next : graph.adj[current]) {
    if (next == start) {
      if (depth >= 2 && first < current) {
        counts[depth + 1] += 1;
      }
      continue;
    }
    if (next > start && !on_path[next] && depth + 1 <= r_max - 1) {
      on_path[next] = 1;
      cycle_dfs(graph, start, next, first, depth + 1, r_max, on_path, counts);
      on_path[next] = 0;
    }
  }
}

}  // namespace

CycleCensus count_cycles(const RegularGraph& graph, int r_max) {
  if (r_max < 3) {
    throw InvalidInput("count_cycles: r_max must be >= 3");
  }
  if (r_max > 8) {
    throw InvalidInput("count_cycles: census depth " + std::to_string(r_max) +
                       " exceeds the budget cap of 8");
  }
  CycleCensus census;
  census.r_max = r_max;
  for (int r = 3; r <= r_max; ++r) census.counts[r] = 0;
  std::vector<char> on_path(graph.n, 0);
  for (int start = 0; start < graph.n; ++start) {
    on_path[start] = 1;
    for (int first : graph.adj[start]) {
      if (first > start) {
        on_path[first] = 1;
        cycle_dfs(graph, start, first, first, 1, r_max, on_path, census.counts);
        on_path[first] = 0;
      }
    }
    on_path[start] = 0;
  }
  return census;
}

GapReport gap_check(const RegularGraph& graph, double g0) {
  GapReport report;
  report.connected = is_connected(graph);
  const int n = graph.n;
  if (n <= 2048) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
      for (int y : graph.adj[x]) q(x, y) = 1.0 / graph.k;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q);
    if (solver.info() != Eigen::Success) {
      throw NumericalFailure("gap_check: eigensolver did not converge");
    }
    report.lambda2 = solver.eigenvalues()(n - 2);
    report.lambda_min = solver.eigenvalues()(0);
  } else {
    // Only the extremal eigenvalues are needed; matvec over adjacency lists.
    MatVec apply_q = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
      for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int y : graph.adj[x]) acc += v(y);
        out(x) = acc / graph.k;
      }
      return out;
    };
    ExtremalEigenvalues ext = extremal_eigenvalues(n, apply_q);
    report.lambda2 = ext.lambda2;
    report.lambda_min = ext.lambda_min;
  }
  if (!report.connected) {
    report.lambda2 = 1.0;
  }
  report.g = std::min(1.0 - report.lambda2, 1.0 - std::abs(report.lambda_min));
  report.passes = (1.0 - report.lambda2 >= g0) &&
                  (1.0 - std::abs(report.lambda_min) >= g0);
  return report;
}

std::vector<ConstancyEntry> constancy_check(const TransitionKernel& kernel,
                                            int ell_max) {
  const int n = kernel.n();
  std::vector<ConstancyEntry> entries;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (int ell = 1; ell <= ell_max; ++ell) {
    power = (power * kernel.entries).eval();
    ConstancyEntry entry;
    entry.ell = ell;
    Eigen::VectorXd diag = power.diagonal();
    entry.constant = (diag.maxCoeff() - diag.minCoeff()) <= 1e-12;
    // Modal value within the same 1e-12 resolution.
    std::vector<double> sorted(diag.data(), diag.data() + n);
    std::sort(sorted.begin(), sorted.end());
    int best_count = 0;
    double best_value = sorted[0];
    int i = 0;
    while (i < n) {
      int j = i;
      while (j < n && sorted[j] - sorted[i] <= 1e-12) ++j;
      if (j - i > best_count) {
        best_count = j - i;
        best_value = sorted[i];
      }
      i = j;
    }
    entry.modal_value = best_value;
    entry.modal_fraction = static_cast<double>(best_count) / n;
    entries.push_back(entry);
  }
  return entries;
}

}  // namespace meetlab
