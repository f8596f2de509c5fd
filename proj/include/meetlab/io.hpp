#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <string>
#include <vector>

#include "meetlab/graph.hpp"

namespace meetlab {

using Json = nlohmann::json;

// Matrices travel either as headerless row-major CSV or as the JSON
// envelope {"n": ..., "entries": [[...]]}.
void write_matrix_csv(const Eigen::MatrixXd& matrix, const std::string& path);
Eigen::MatrixXd read_matrix_csv(const std::string& path);
Json matrix_to_json(const Eigen::MatrixXd& matrix);
Eigen::MatrixXd matrix_from_json(const Json& envelope);

Json spectrum_to_json(const Eigen::VectorXd& eigenvalues);

// Graphs: edge-list text ("u v" per line, 0-indexed) plus JSON metadata.
void write_graph(const RegularGraph& graph, const std::string& edge_path,
                 const std::string& meta_path);
RegularGraph read_graph(const std::string& edge_path, const std::string& meta_path);

void write_samples_csv(const std::vector<double>& samples, const std::string& path);

// Provenance header attached to every report: hash of the canonical config
// (timestamp deliberately excluded from the hash), tool version, timestamp.
Json make_provenance(const Json& config);

void write_json(const Json& value, const std::string& path);
Json read_json(const std::string& path);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace meetlab
