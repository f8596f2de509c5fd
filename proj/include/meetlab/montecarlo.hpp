#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "meetlab/graph.hpp"

namespace meetlab {

/// Seeded batch of exact meeting-time samples on one graph.
struct SampleBatch {
  std::string graph_id;
  int k = 0;
  int n = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> samples;  // meeting times in rate-1 walk time units

  std::vector<double> scaled() const;  // samples divided by n
};

/// Draws `count` independent meeting times: stationary (uniform) starts, two
/// rate-1 walkers simulated event-by-event with exponential(2) holding times
/// and a fair coin deciding which walker jumps. No time discretization, so
/// each sample is exact. Per-sample RNG streams are derived from the master
/// seed by index, making the batch independent of scheduling order.
SampleBatch sample_meeting(const RegularGraph& graph, int count,
                           std::uint64_t master_seed, int threads = 0);

/// Estimators against the exponential limit law with mean (k-1)/(2(k-2)).
struct LimitComparison {
  double mean_est = 0.0;  // sample mean of M/n
  double mean_se = 0.0;
  std::vector<double> moment_ratios;  // E[(M/n)^l] / (l! mean^l), l = 1..4
  double ks_distance = 0.0;           // empirical CDF of scaled samples vs Exp(1)
  double w1_distance = 0.0;           // exact integral of |CDF difference|
};

LimitComparison compare_to_limit(const SampleBatch& batch);

/// Empirical Laplace transform: mean and standard error of e^{-lambda M}.
struct LaplaceEstimate {
  double value = 0.0;
  double se = 0.0;
};
LaplaceEstimate empirical_laplace(const SampleBatch& batch, double lambda);

struct SweepRow {
  int n = 0;
  int graphs = 0;
  double mean_est = 0.0;      // averaged over graph seeds
  double pooled_se = 0.0;
  double mean_deviation = 0.0;  // |mean_est - limit mean|
  double ks_distance = 0.0;     // averaged over graph seeds
};

struct SweepReport {
  int k = 0;
  std::vector<SweepRow> rows;
  bool deviation_non_increasing = false;  // within one pooled SE
};

/// Averages meeting-time estimators over fresh graph seeds at each size and
/// reports whether the deviation from the limit mean trends downward.
SweepReport convergence_sweep(int k, const std::vector<int>& sizes,
                              int seeds_per_size, int samples_per_graph,
                              std::uint64_t master_seed, int threads = 0);

/// KS and W1 distances between sorted nonnegative samples and Exp(1).
double ks_to_exponential(const std::vector<double>& sorted_scaled);
double w1_to_exponential(const std::vector<double>& sorted_scaled);

/// Thread budget: explicit argument, else MEETLAB_THREADS, else hardware.
int resolve_threads(int requested);

}  // namespace meetlab
