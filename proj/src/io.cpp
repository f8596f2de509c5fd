#include "meetlab/io.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "meetlab/errors.hpp"

namespace meetlab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInput("cannot open for writing: " + path);
  }
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open for reading: " + path);
  }
  return in;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

void write_matrix_csv(const Eigen::MatrixXd& matrix, const std::string& path) {
  std::ofstream out = open_out(path);
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      out << matrix(r, c);
      out << (c + 1 == matrix.cols() ? '\n' : ',');
    }
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidInput("ragged CSV matrix in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw InvalidInput("empty CSV matrix in " + path);
  }
  Eigen::MatrixXd matrix(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      matrix(r, c) = rows[r][c];
    }
  }
  return matrix;
}

Json matrix_to_json(const Eigen::MatrixXd& matrix) {
  Json entries = Json::array();
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      row.push_back(matrix(r, c));
    }
    entries.push_back(std::move(row));
  }
  return Json{{"n", matrix.rows()}, {"entries", std::move(entries)}};
}

Eigen::MatrixXd matrix_from_json(const Json& envelope) {
  if (!envelope.contains("n") || !envelope.contains("entries")) {
    throw InvalidInput("matrix JSON envelope must have keys n and entries");
  }
  const auto n = envelope.at("n").get<Eigen::Index>();
  const Json& entries = envelope.at("entries");
  if (static_cast<Eigen::Index>(entries.size()) != n) {
    throw InvalidInput("matrix JSON envelope: row count does not match n");
  }
  Eigen::MatrixXd matrix(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = entries.at(r);
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw InvalidInput("matrix JSON envelope: ragged row");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      matrix(r, c) = row.at(c).get<double>();
    }
  }
  return matrix;
}

Json spectrum_to_json(const Eigen::VectorXd& eigenvalues) {
  Json values = Json::array();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    values.push_back(eigenvalues(i));
  }
  return Json{{"eigenvalues", std::move(values)}};
}

void write_graph(const RegularGraph& graph, const std::string& edge_path,
                 const std::string& meta_path) {
  std::ofstream out = open_out(edge_path);
  for (int u = 0; u < graph.n; ++u) {
    for (int v : graph.adj[u]) {
      if (u < v) out << u << ' ' << v << '\n';
    }
  }
  write_json(Json{{"n", graph.n}, {"k", graph.k}, {"seed", graph.seed}}, meta_path);
}

RegularGraph read_graph(const std::string& edge_path, const std::string& meta_path) {
  Json meta = read_json(meta_path);
  RegularGraph graph;
  graph.n = meta.at("n").get<int>();
  graph.k = meta.at("k").get<int>();
  graph.seed = meta.value("seed", std::uint64_t{0});
  graph.adj.resize(graph.n);

  std::ifstream in = open_in(edge_path);
  int u, v;
  while (in >> u >> v) {
    if (u < 0 || v < 0 || u >= graph.n || v >= graph.n || u == v) {
      throw InvalidInput("edge list: bad edge " + std::to_string(u) + " " +
                         std::to_string(v));
    }
    graph.adj[u].push_back(v);
    graph.adj[v].push_back(u);
  }
  for (auto& nbrs : graph.adj) {
    std::sort(nbrs.begin(), nbrs.end());
    if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) {
      throw InvalidInput("edge list: duplicate edge");
    }
    if (static_cast<int>(nbrs.size()) != graph.k) {
      throw InvalidInput("edge list does not match metadata: expected degree " +
                         std::to_string(graph.k));
    }
  }
  return graph;
}

void write_samples_csv(const std::vector<double>& samples, const std::string& path) {
  std::ofstream out = open_out(path);
  out << std::setprecision(17);
  for (double s : samples) out << s << '\n';
}

Json make_provenance(const Json& config) {
  std::ostringstream hash_hex;
  hash_hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a(config.dump());
  auto now = std::chrono::system_clock::now();
  return Json{{"config_hash", hash_hex.str()},
              {"version", kToolVersion},
              {"timestamp", std::chrono::duration_cast<std::chrono::seconds>(
                                now.time_since_epoch())
                                .count()}};
}

void write_json(const Json& value, const std::string& path) {
  std::ofstream out = open_out(path);
  out << value.dump(2) << '\n';
}

Json read_json(const std::string& path) {
  std::ifstream in = open_in(path);
  Json value;
  try {
    in >> value;
  } catch (const Json::parse_error& err) {
    throw InvalidInput("bad JSON in " + path + ": " + err.what());
  }
  return value;
}

}  // namespace meetlab
