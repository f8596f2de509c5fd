#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "meetlab/errors.hpp"
#include "meetlab/graph.hpp"
#include "meetlab/io.hpp"
#include "meetlab/rng.hpp"

using namespace meetlab;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("meetlab_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("matrix CSV round trip preserves full precision") {
  TempDir dir;
  auto rng = make_engine(11);
  Eigen::MatrixXd m(7, 7);
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) m(i, j) = uniform_unit(rng) * 1e3 - 500.0;
  }
  write_matrix_csv(m, dir.file("m.csv"));
  Eigen::MatrixXd back = read_matrix_csv(dir.file("m.csv"));
  REQUIRE(back.rows() == 7);
  REQUIRE(back.cols() == 7);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix JSON round trip") {
  Eigen::MatrixXd m(2, 2);
  m << 0.0, 1.0 / 3.0, -2.5, 1e-17;
  Json envelope = matrix_to_json(m);
  CHECK(envelope["n"] == 2);
  Eigen::MatrixXd back = matrix_from_json(envelope);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("malformed matrix inputs are rejected") {
  TempDir dir;
  {
    std::FILE* f = std::fopen(dir.file("ragged.csv").c_str(), "w");
    std::fputs("1,2,3\n4,5\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_matrix_csv(dir.file("ragged.csv")), InvalidInput);
  CHECK_THROWS_AS(read_matrix_csv(dir.file("missing.csv")), InvalidInput);
  CHECK_THROWS_AS(matrix_from_json(Json{{"n", 3}}), InvalidInput);
}

TEST_CASE("spectrum serialization is ordered") {
  Eigen::VectorXd ev(3);
  ev << 1.0, 0.25, -0.5;
  Json spec = spectrum_to_json(ev);
  REQUIRE(spec["eigenvalues"].size() == 3);
  CHECK(spec["eigenvalues"][0] == 1.0);
  CHECK(spec["eigenvalues"][2] == -0.5);
}

TEST_CASE("graph round trip") {
  TempDir dir;
  RegularGraph graph = sample_regular(20, 3, 404);
  write_graph(graph, dir.file("g.edges"), dir.file("g.json"));
  RegularGraph back = read_graph(dir.file("g.edges"), dir.file("g.json"));
  CHECK(back.n == graph.n);
  CHECK(back.k == graph.k);
  CHECK(back.seed == graph.seed);
  CHECK(back.adj == graph.adj);
}

TEST_CASE("graph reader validates the metadata") {
  TempDir dir;
  RegularGraph graph = sample_regular(10, 3, 1);
  write_graph(graph, dir.file("g.edges"), dir.file("g.json"));
  Json meta = read_json(dir.file("g.json"));
  meta["n"] = 11;  // inconsistent with the edge list
  write_json(meta, dir.file("bad.json"));
  CHECK_THROWS_AS(read_graph(dir.file("g.edges"), dir.file("bad.json")), InvalidInput);
}

TEST_CASE("samples CSV") {
  TempDir dir;
  write_samples_csv({0.0, 1.5, 2.25}, dir.file("s.csv"));
  Eigen::MatrixXd back = read_matrix_csv(dir.file("s.csv"));
  REQUIRE(back.rows() == 3);
  CHECK(back(0, 0) == 0.0);
  CHECK(back(2, 0) == 2.25);
}

TEST_CASE("provenance hash depends on the config, not the clock") {
  Json config = {{"op", "exact"}, {"lambda", 1.0}};
  Json a = make_provenance(config);
  Json b = make_provenance(config);
  CHECK(a["config_hash"] == b["config_hash"]);
  CHECK(a["version"] == kToolVersion);
  CHECK(a.contains("timestamp"));

  Json other = make_provenance(Json{{"op", "exact"}, {"lambda", 2.0}});
  CHECK(other["config_hash"] != a["config_hash"]);
}

TEST_CASE("generic JSON file round trip") {
  TempDir dir;
  Json value = {{"a", 1}, {"b", {1, 2, 3}}, {"c", "text"}};
  write_json(value, dir.file("v.json"));
  CHECK(read_json(dir.file("v.json")) == value);
  CHECK_THROWS_AS(read_json(dir.file("nope.json")), InvalidInput);
}
