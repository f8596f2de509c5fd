// Experiment runner. Subcommands wrap the library modules one-to-one:
//   generate  random regular graph + gap report + optional cycle census
//   exact     identity verification over a lambda grid
//   simulate  meeting-time sampling / size sweeps
//   mckay     tree moments and the resolvent sum
//   spectrum  eigenvalue dump
// Exit codes: 0 pass, 1 assertion failure, 2 invalid input, 3 numerical
// failure. Parameters come from flags or a JSON config (flags win).
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "meetlab/chain.hpp"
#include "meetlab/errors.hpp"
#include "meetlab/graph.hpp"
#include "meetlab/io.hpp"
#include "meetlab/mckay.hpp"
#include "meetlab/meeting.hpp"
#include "meetlab/montecarlo.hpp"
#include "meetlab/rng.hpp"

using namespace meetlab;

namespace {

std::vector<double> parse_lambdas(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw InvalidInput("bad lambda value: " + cell);
    }
    if (values.back() <= 0.0) throw InvalidInput("lambdas must be positive");
  }
  if (values.empty()) throw InvalidInput("empty lambda list");
  return values;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> values;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      values.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw InvalidInput("bad integer value: " + cell);
    }
  }
  return values;
}

RegularGraph parse_torus(const std::string& text) {
  auto x = text.find('x');
  if (x == std::string::npos) {
    throw InvalidInput("torus spec must look like DxM, e.g. 3x4");
  }
  int d, m;
  try {
    d = std::stoi(text.substr(0, x));
    m = std::stoi(text.substr(x + 1));
  } catch (const std::exception&) {
    throw InvalidInput("bad torus spec: " + text);
  }
  return build_torus(d, m);
}

using ConfigSetter = std::function<void(const Json&)>;
using ConfigSetters = std::map<std::string, ConfigSetter>;

template <typename T>
ConfigSetter bind_to(T& target) {
  return [&target](const Json& value) {
    if constexpr (std::is_same_v<T, std::string>) {
      target = value.is_string() ? value.get<std::string>() : value.dump();
    } else if constexpr (std::is_same_v<T, bool>) {
      target = value.get<bool>();
    } else {
      if (value.is_string()) {
        std::stringstream ss(value.get<std::string>());
        ss >> target;
        if (ss.fail()) throw InvalidInput("bad config value: " + value.dump());
      } else {
        target = value.get<T>();
      }
    }
  };
}

// Fills parameters from the JSON config for options the user did not pass on
// the command line (flags win), and rejects keys the subcommand does not know.
void apply_config(const CLI::App* cmd, const std::string& config_path,
                  const ConfigSetters& setters) {
  if (config_path.empty()) return;
  Json config = read_json(config_path);
  if (!config.is_object()) throw InvalidInput("config must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw InvalidInput("config key not recognized by this command: " + key);
    }
    if (cmd->get_option("--" + key)->count() > 0) continue;
    it->second(value);
  }
}

struct GenerateArgs {
  int k = 3;
  int n = 0;
  std::uint64_t seed = 0;
  int census = 0;
  double g0 = 0.02;
  std::string torus;
  std::string out = "graph";
  std::string config;
};

int run_generate(const GenerateArgs& args) {
  Json provenance_config{{"command", "generate"}, {"k", args.k},
                         {"n", args.n},          {"seed", args.seed},
                         {"census", args.census}, {"g0", args.g0},
                         {"torus", args.torus},  {"out", args.out}};
  RegularGraph graph;
  if (!args.torus.empty()) {
    graph = parse_torus(args.torus);
  } else {
    if (args.n <= 0) throw InvalidInput("generate: --n is required");
    graph = sample_regular(args.n, args.k, args.seed);
  }
  GapReport gap = gap_check(graph, args.g0);

  write_graph(graph, args.out + ".edges", args.out + ".json");
  Json report{{"provenance", make_provenance(provenance_config)},
              {"n", graph.n},
              {"k", graph.k},
              {"seed", graph.seed},
              {"gap",
               {{"lambda2", gap.lambda2},
                {"lambda_min", gap.lambda_min},
                {"g", gap.g},
                {"connected", gap.connected},
                {"passes", gap.passes}}}};
  if (args.census > 0) {
    CycleCensus census = count_cycles(graph, args.census);
    Json counts = Json::object();
    for (const auto& [r, c] : census.counts) counts[std::to_string(r)] = c;
    report["census"] = counts;
  }
  write_json(report, args.out + "_report.json");
  std::cout << report.dump(2) << '\n';
  return gap.passes ? 0 : 1;
}

struct ExactArgs {
  std::string edges;
  std::string meta;
  std::string torus;
  std::string lambdas = "0.1,1,10";
  double tol = 1e-8;
  bool trace_formula = false;
  std::string out = "exact_report.json";
  std::string config;
};

int run_exact(const ExactArgs& args) {
  Json provenance_config{{"command", "exact"},
                         {"edges", args.edges},
                         {"meta", args.meta},
                         {"torus", args.torus},
                         {"lambdas", args.lambdas},
                         {"tol", args.tol},
                         {"trace-formula", args.trace_formula},
                         {"out", args.out}};
  RegularGraph graph;
  std::string graph_id;
  if (!args.torus.empty()) {
    graph = parse_torus(args.torus);
    graph_id = "torus_" + args.torus;
  } else if (!args.edges.empty() && !args.meta.empty()) {
    graph = read_graph(args.edges, args.meta);
    graph_id = args.edges;
  } else {
    throw InvalidInput("exact: need --edges and --meta, or --torus");
  }
  TransitionKernel base = graph.kernel();
  MeetingSolution means = mean_meeting(base);

  Json rows = Json::array();
  bool all_pass = true;
  std::string offender;
  for (double lambda : parse_lambdas(args.lambdas)) {
    MeetingSolution sol = laplace_meeting(base, lambda);
    double green = verify_green_identity(base, lambda);
    double res = verify_res_identity(base, lambda);
    FixedPointReport prop = verify_fixed_point(base, lambda);
    Json row{{"lambda", lambda},
             {"laplace", sol.laplace},
             {"residuals",
              {{"green_identity", green},
               {"resolvent_split", res},
               {"fixed_point", prop.equation_residual}}},
             {"domination_ok", prop.domination_ok}};
    if (args.trace_formula) {
      double trace_value = normalized_trace_transform(base, lambda);
      row["trace_formula"] = trace_value;
      row["trace_gap"] = std::abs(trace_value - sol.laplace);
      if (row["trace_gap"].get<double>() > args.tol) {
        all_pass = false;
        offender = "trace formula at lambda " + std::to_string(lambda);
      }
    }
    rows.push_back(row);
    auto flag = [&](double value, const char* name) {
      if (value > args.tol) {
        all_pass = false;
        offender = std::string(name) + " at lambda " + std::to_string(lambda);
      }
    };
    flag(green, "green identity");
    flag(res, "resolvent split identity");
    flag(prop.equation_residual, "fixed-point equation");
    if (!prop.domination_ok) {
      all_pass = false;
      offender = "domination bound at lambda " + std::to_string(lambda);
    }
  }

  Json report{{"provenance", make_provenance(provenance_config)},
              {"graph_id", graph_id},
              {"mean", means.mean},
              {"tolerance", args.tol},
              {"results", rows},
              {"all_pass", all_pass}};
  write_json(report, args.out);
  std::cout << report.dump(2) << '\n';
  if (!all_pass) {
    std::cerr << "identity check failed: " << offender << '\n';
    return 1;
  }
  return 0;
}

struct SimulateArgs {
  int k = 3;
  int n = 0;
  int samples = 10000;
  std::uint64_t seed = 0;
  std::uint64_t graph_seed = 0;
  bool graph_seed_set = false;
  std::string sweep;
  int seeds_per_size = 5;
  int threads = 0;
  std::string out = "simulate";
  std::string config;
};

int run_simulate(const SimulateArgs& args) {
  Json provenance_config{{"command", "simulate"},
                         {"k", args.k},
                         {"n", args.n},
                         {"samples", args.samples},
                         {"seed", args.seed},
                         {"graph-seed", args.graph_seed_set ? Json(args.graph_seed)
                                                            : Json(nullptr)},
                         {"sweep", args.sweep},
                         {"seeds-per-size", args.seeds_per_size},
                         {"out", args.out}};
  if (args.samples <= 0) throw InvalidInput("simulate: --samples must be positive");

  if (!args.sweep.empty()) {
    std::vector<int> sizes = parse_int_list(args.sweep);
    SweepReport sweep = convergence_sweep(args.k, sizes, args.seeds_per_size,
                                          args.samples, args.seed, args.threads);
    Json rows = Json::array();
    for (const SweepRow& row : sweep.rows) {
      rows.push_back({{"n", row.n},
                      {"graphs", row.graphs},
                      {"mean_est", row.mean_est},
                      {"pooled_se", row.pooled_se},
                      {"mean_deviation", row.mean_deviation},
                      {"ks_distance", row.ks_distance}});
    }
    Json report{{"provenance", make_provenance(provenance_config)},
                {"k", sweep.k},
                {"limit_mean", limit_mean(args.k)},
                {"rows", rows},
                {"deviation_non_increasing", sweep.deviation_non_increasing}};
    write_json(report, args.out + "_sweep.json");
    std::cout << report.dump(2) << '\n';
    return sweep.deviation_non_increasing ? 0 : 1;
  }

  if (args.n <= 0) throw InvalidInput("simulate: --n is required");
  std::uint64_t graph_seed = args.graph_seed_set ? args.graph_seed : args.seed;
  RegularGraph graph = sample_regular(args.n, args.k, graph_seed);
  for (int retry = 1; !is_connected(graph) && retry <= 100; ++retry) {
    graph = sample_regular(args.n, args.k, derive_seed(graph_seed, retry));
  }

  SampleBatch batch = sample_meeting(graph, args.samples, args.seed, args.threads);
  LimitComparison cmp = compare_to_limit(batch);

  write_samples_csv(batch.samples, args.out + "_samples.csv");
  write_json(Json{{"graph_id", batch.graph_id},
                  {"k", batch.k},
                  {"n", batch.n},
                  {"master_seed", batch.master_seed},
                  {"count", batch.samples.size()}},
             args.out + "_samples.json");
  Json report{{"provenance", make_provenance(provenance_config)},
              {"graph_id", batch.graph_id},
              {"limit_mean", limit_mean(args.k)},
              {"mean_est", cmp.mean_est},
              {"mean_se", cmp.mean_se},
              {"moment_ratios", cmp.moment_ratios},
              {"ks_distance", cmp.ks_distance},
              {"w1_distance", cmp.w1_distance}};
  write_json(report, args.out + "_comparison.json");
  std::cout << report.dump(2) << '\n';
  return 0;
}

struct MckayArgs {
  int k = 3;
  int order = 40;
  std::string out = "mckay";
  std::string config;
};

int run_mckay(const MckayArgs& args) {
  Json provenance_config{{"command", "mckay"},
                         {"k", args.k},
                         {"L", args.order},
                         {"out", args.out}};
  TreeMoments dp = moments_tree_dp(args.k, args.order);
  TreeMoments quad = moments_quadrature(args.k, args.order);
  ResolventSum sum = resolvent_sum(args.k, args.order);

  {
    std::FILE* f = std::fopen((args.out + "_moments.csv").c_str(), "w");
    if (f == nullptr) throw InvalidInput("cannot open " + args.out + "_moments.csv");
    std::fprintf(f, "ell,value,method\n");
    for (int ell = 0; ell <= args.order; ++ell) {
      std::fprintf(f, "%d,%.17g,tree_dp\n", ell, dp.moments[ell]);
      std::fprintf(f, "%d,%.17g,quadrature\n", ell, quad.moments[ell]);
    }
    std::fclose(f);
  }

  double worst = 0.0;
  for (int ell = 0; ell <= args.order; ++ell) {
    worst = std::max(worst, std::abs(dp.moments[ell] - quad.moments[ell]));
  }
  Json report{{"provenance", make_provenance(provenance_config)},
              {"k", args.k},
              {"order", args.order},
              {"max_method_gap", worst},
              {"resolvent",
               {{"exact", sum.exact},
                {"partial", sum.partial},
                {"tail_bound", sum.tail_bound}}},
              {"limit_mean", limit_mean(args.k)}};
  write_json(report, args.out + "_report.json");
  std::cout << report.dump(2) << '\n';
  return worst <= 1e-8 ? 0 : 1;
}

struct SpectrumArgs {
  std::string edges;
  std::string meta;
  std::string torus;
  std::string out = "spectrum.json";
  std::string config;
};

int run_spectrum(const SpectrumArgs& args) {
  Json provenance_config{{"command", "spectrum"},
                         {"edges", args.edges},
                         {"meta", args.meta},
                         {"torus", args.torus},
                         {"out", args.out}};
  RegularGraph graph;
  if (!args.torus.empty()) {
    graph = parse_torus(args.torus);
  } else if (!args.edges.empty() && !args.meta.empty()) {
    graph = read_graph(args.edges, args.meta);
  } else {
    throw InvalidInput("spectrum: need --edges and --meta, or --torus");
  }
  SpectralDecomposition spec = eigendecompose(graph.kernel());
  Json report = spectrum_to_json(spec.eigenvalues);
  report["provenance"] = make_provenance(provenance_config);
  report["n"] = spec.n();
  report["gap_warning"] = spec.gap_warning;
  write_json(report, args.out);
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meeting-time laboratory for random walks on regular graphs"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("generate", "sample a random regular graph");
  cmd_gen->add_option("--k", gen.k, "degree");
  cmd_gen->add_option("--n", gen.n, "vertex count");
  cmd_gen->add_option("--seed", gen.seed, "sampler seed");
  cmd_gen->add_option("--census", gen.census, "count cycles up to this length");
  cmd_gen->add_option("--g0", gen.g0, "required spectral gap");
  cmd_gen->add_option("--torus", gen.torus, "build a DxM torus instead");
  cmd_gen->add_option("--out", gen.out, "output path prefix");
  cmd_gen->add_option("--config", gen.config, "JSON config file");

  ExactArgs exact;
  CLI::App* cmd_exact = app.add_subcommand("exact", "verify meeting-time identities");
  cmd_exact->add_option("--edges", exact.edges, "edge-list file");
  cmd_exact->add_option("--meta", exact.meta, "graph metadata JSON");
  cmd_exact->add_option("--torus", exact.torus, "DxM torus");
  cmd_exact->add_option("--lambdas", exact.lambdas, "comma-separated lambda grid");
  cmd_exact->add_option("--tol", exact.tol, "residual tolerance");
  cmd_exact->add_flag("--trace-formula", exact.trace_formula,
                      "also compare the trace formula");
  cmd_exact->add_option("--out", exact.out, "report path");
  cmd_exact->add_option("--config", exact.config, "JSON config file");

  SimulateArgs sim;
  CLI::App* cmd_sim = app.add_subcommand("simulate", "sample meeting times");
  cmd_sim->add_option("--k", sim.k, "degree");
  cmd_sim->add_option("--n", sim.n, "vertex count");
  cmd_sim->add_option("--samples", sim.samples, "samples per graph");
  cmd_sim->add_option("--seed", sim.seed, "master seed");
  CLI::Option* gseed =
      cmd_sim->add_option("--graph-seed", sim.graph_seed, "separate graph seed");
  cmd_sim->add_option("--sweep", sim.sweep, "comma-separated sizes for a sweep");
  cmd_sim->add_option("--seeds-per-size", sim.seeds_per_size, "graphs per size");
  cmd_sim->add_option("--threads", sim.threads, "worker threads (0 = auto)");
  cmd_sim->add_option("--out", sim.out, "output path prefix");
  cmd_sim->add_option("--config", sim.config, "JSON config file");

  MckayArgs mckay;
  CLI::App* cmd_mckay = app.add_subcommand("mckay", "tree moments and resolvent sum");
  cmd_mckay->add_option("--k", mckay.k, "degree");
  cmd_mckay->add_option("--L", mckay.order, "maximum order");
  cmd_mckay->add_option("--out", mckay.out, "output path prefix");
  cmd_mckay->add_option("--config", mckay.config, "JSON config file");

  SpectrumArgs spectrum;
  CLI::App* cmd_spec = app.add_subcommand("spectrum", "dump walk eigenvalues");
  cmd_spec->add_option("--edges", spectrum.edges, "edge-list file");
  cmd_spec->add_option("--meta", spectrum.meta, "graph metadata JSON");
  cmd_spec->add_option("--torus", spectrum.torus, "DxM torus");
  cmd_spec->add_option("--out", spectrum.out, "report path");
  cmd_spec->add_option("--config", spectrum.config, "JSON config file");

  try {
    app.parse(argc, argv);
    if (cmd_gen->parsed()) {
      apply_config(cmd_gen, gen.config,
                   {{"k", bind_to(gen.k)},
                    {"n", bind_to(gen.n)},
                    {"seed", bind_to(gen.seed)},
                    {"census", bind_to(gen.census)},
                    {"g0", bind_to(gen.g0)},
                    {"torus", bind_to(gen.torus)},
                    {"out", bind_to(gen.out)}});
      return run_generate(gen);
    }
    if (cmd_exact->parsed()) {
      apply_config(cmd_exact, exact.config,
                   {{"edges", bind_to(exact.edges)},
                    {"meta", bind_to(exact.meta)},
                    {"torus", bind_to(exact.torus)},
                    {"lambdas", bind_to(exact.lambdas)},
                    {"tol", bind_to(exact.tol)},
                    {"trace-formula", bind_to(exact.trace_formula)},
                    {"out", bind_to(exact.out)}});
      return run_exact(exact);
    }
    if (cmd_sim->parsed()) {
      sim.graph_seed_set = gseed->count() > 0;
      ConfigSetter set_graph_seed = [&sim](const Json& value) {
        bind_to(sim.graph_seed)(value);
        sim.graph_seed_set = true;
      };
      apply_config(cmd_sim, sim.config,
                   {{"k", bind_to(sim.k)},
                    {"n", bind_to(sim.n)},
                    {"samples", bind_to(sim.samples)},
                    {"seed", bind_to(sim.seed)},
                    {"graph-seed", set_graph_seed},
                    {"sweep", bind_to(sim.sweep)},
                    {"seeds-per-size", bind_to(sim.seeds_per_size)},
                    {"threads", bind_to(sim.threads)},
                    {"out", bind_to(sim.out)}});
      return run_simulate(sim);
    }
    if (cmd_mckay->parsed()) {
      apply_config(cmd_mckay, mckay.config,
                   {{"k", bind_to(mckay.k)},
                    {"L", bind_to(mckay.order)},
                    {"out", bind_to(mckay.out)}});
      return run_mckay(mckay);
    }
    if (cmd_spec->parsed()) {
      apply_config(cmd_spec, spectrum.config,
                   {{"edges", bind_to(spectrum.edges)},
                    {"meta", bind_to(spectrum.meta)},
                    {"torus", bind_to(spectrum.torus)},
                    {"out", bind_to(spectrum.out)}});
      return run_spectrum(spectrum);
    }
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
