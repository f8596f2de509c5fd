#include "meetlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "meetlab/errors.hpp"
#include "meetlab/mckay.hpp"
#include "meetlab/rng.hpp"

namespace meetlab {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MEETLAB_THREADS")) {
    int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<double> SampleBatch::scaled() const {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i] / n;
  return out;
}

namespace {

double simulate_one(const RegularGraph& graph, std::uint64_t seed) {
  std::mt19937_64 rng = make_engine(seed);
  const std::uint32_t n = static_cast<std::uint32_t>(graph.n);
  int x = static_cast<int>(uniform_below(rng, n));
  int y = static_cast<int>(uniform_below(rng, n));
  double t = 0.0;
  while (x != y) {
    t += exponential(rng, 2.0);
    bool move_x = (rng() & 1ULL) != 0;
    int& walker = move_x ? x : y;
    const auto& nbrs = graph.adj[walker];
    walker = nbrs[uniform_below(rng, static_cast<std::uint32_t>(nbrs.size()))];
  }
  return t;
}

}  // namespace

SampleBatch sample_meeting(const RegularGraph& graph, int count,
                           std::uint64_t master_seed, int threads) {
  if (count < 1) {
    throw InvalidInput("sample_meeting: count must be >= 1");
  }
  if (!is_connected(graph)) {
    throw InvalidInput("sample_meeting: graph is disconnected, meeting time may be infinite");
  }
  SampleBatch batch;
  batch.graph_id = "n" + std::to_string(graph.n) + "-k" + std::to_string(graph.k) +
                   "-s" + std::to_string(graph.seed);
  batch.k = graph.k;
  batch.n = graph.n;
  batch.master_seed = master_seed;
  batch.samples.resize(count);

  const int workers = std::min(resolve_threads(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<double>& samples = batch.samples;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < count; i += workers) {
        samples[i] = simulate_one(graph, derive_seed(master_seed, i));
      }
    });
  }
  for (auto& t : pool) t.join();
  return batch;
}

double ks_to_exponential(const std::vector<double>& sorted_scaled) {
  const std::size_t n = sorted_scaled.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double cdf = 1.0 - std::exp(-sorted_scaled[i]);
    worst = std::max(worst, std::abs(cdf - static_cast<double>(i) / n));
    worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  return worst;
}

double w1_to_exponential(const std::vector<double>& sorted_scaled) {
  // Piecewise exact: between consecutive order statistics the empirical CDF
  // is the constant c = i/n, and int (F - c) dt has antiderivative
  // (1-c) t + e^{-t}. Split at the crossing point t* = -log(1-c).
  const std::size_t n = sorted_scaled.size();
  auto segment = [](double a, double b, double c) {
    auto anti = [c](double t) { return (1.0 - c) * t + std::exp(-t); };
    auto piece = [&](double lo, double hi) { return std::abs(anti(hi) - anti(lo)); };
    if (c >= 1.0) return piece(a, b);
    double crossing = -std::log(1.0 - c);
    if (crossing <= a || crossing >= b) return piece(a, b);
    return piece(a, crossing) + piece(crossing, b);
  };
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double next = sorted_scaled[i];
    if (next > prev) {
      total += segment(prev, next, static_cast<double>(i) / n);
      prev = next;
    }
  }
  total += std::exp(-prev);  // tail where the empirical CDF is already 1
  return total;
}

LimitComparison compare_to_limit(const SampleBatch& batch) {
  if (batch.samples.empty()) {
    throw InvalidInput("compare_to_limit: empty batch");
  }
  const double mu = limit_mean(batch.k);
  std::vector<double> scaled = batch.scaled();
  const std::size_t count = scaled.size();

  LimitComparison cmp;
  double sum = 0.0, sum_sq = 0.0;
  for (double s : scaled) {
    sum += s;
    sum_sq += s * s;
  }
  cmp.mean_est = sum / count;
  double variance = (sum_sq - count * cmp.mean_est * cmp.mean_est) /
                    std::max<std::size_t>(count - 1, 1);
  cmp.mean_se = std::sqrt(variance / count);

  double factorial = 1.0;
  for (int ell = 1; ell <= 4; ++ell) {
    factorial *= ell;
    double moment = 0.0;
    for (double s : scaled) moment += std::pow(s, ell);
    moment /= count;
    cmp.moment_ratios.push_back(moment / (factorial * std::pow(mu, ell)));
  }

  std::vector<double> normalized(count);
  for (std::size_t i = 0; i < count; ++i) normalized[i] = scaled[i] / mu;
  std::sort(normalized.begin(), normalized.end());
  cmp.ks_distance = ks_to_exponential(normalized);
  cmp.w1_distance = w1_to_exponential(normalized);
  return cmp;
}

LaplaceEstimate empirical_laplace(const SampleBatch& batch, double lambda) {
  if (batch.samples.empty()) {
    throw InvalidInput("empirical_laplace: empty batch");
  }
  const std::size_t count = batch.samples.size();
  double sum = 0.0, sum_sq = 0.0;
  for (double m : batch.samples) {
    double e = std::exp(-lambda * m);
    sum += e;
    sum_sq += e * e;
  }
  LaplaceEstimate est;
  est.value = sum / count;
  double variance =
      (sum_sq - count * est.value * est.value) / std::max<std::size_t>(count - 1, 1);
  est.se = std::sqrt(variance / count);
  return est;
}

SweepReport convergence_sweep(int k, const std::vector<int>& sizes,
                              int seeds_per_size, int samples_per_graph,
                              std::uint64_t master_seed, int threads) {
  if (sizes.empty() || seeds_per_size < 1 || samples_per_graph < 1) {
    throw InvalidInput("convergence_sweep: empty size grid or nonpositive counts");
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) {
      throw InvalidInput("convergence_sweep: sizes must be ascending");
    }
  }
  const double mu = limit_mean(k);
  SweepReport report;
  report.k = k;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    int n = sizes[si];
    SweepRow row;
    row.n = n;
    double mean_acc = 0.0, se_sq_acc = 0.0, ks_acc = 0.0;
    for (int g = 0; g < seeds_per_size; ++g) {
      std::uint64_t graph_seed = derive_seed(master_seed, (si << 20) + g);
      RegularGraph graph = sample_regular(n, k, graph_seed);
      int retry = 0;
      while (!is_connected(graph) && retry < 100) {
        graph = sample_regular(n, k, derive_seed(graph_seed, ++retry));
      }
      SampleBatch batch = sample_meeting(
          graph, samples_per_graph, derive_seed(master_seed, (si << 20) + g + 0x10000),
          threads);
      LimitComparison cmp = compare_to_limit(batch);
      mean_acc += cmp.mean_est;
      se_sq_acc += cmp.mean_se * cmp.mean_se;
      ks_acc += cmp.ks_distance;
      ++row.graphs;
    }
    row.mean_est = mean_acc / row.graphs;
    row.pooled_se = std::sqrt(se_sq_acc) / row.graphs;
    row.mean_deviation = std::abs(row.mean_est - mu);
    row.ks_distance = ks_acc / row.graphs;
    report.rows.push_back(row);
  }
  report.deviation_non_increasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    double slack = report.rows[i - 1].pooled_se + report.rows[i].pooled_se;
    if (report.rows[i].mean_deviation > report.rows[i - 1].mean_deviation + slack) {
      report.deviation_non_increasing = false;
    }
  }
  return report;
}

}  // namespace meetlab
