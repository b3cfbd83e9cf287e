#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "common.hpp"
#include "gmt/corpus.hpp"
#include "gmt/error.hpp"
#include "gmt/frostman.hpp"
#include "gmt/io.hpp"
#include "gmt/sparsify.hpp"

using namespace gmt;
using nlohmann::json;

TEST_CASE("format_double round trips") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1.0) == "1");
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double x = std::ldexp(rng.uniform(), -static_cast<int>(rng.below(80)));
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("explicit set round trip") {
  Rng rng(2);
  const CellSet s = testing::random_cells(2, 4, 0.3, rng);
  const std::string text = set_to_json(s);
  const json j = json::parse(text);
  CHECK(j["n"] == 2);
  CHECK(j["depth"] == 4);
  CHECK(j["cells"].size() == static_cast<std::size_t>(s.size()));
  CHECK(set_from_json(text) == s);
  CHECK(set_to_json(set_from_json(text)) == text);
  CHECK(set_from_json(R"({"n": 2, "depth": 3, "cells": [[1, 2], [1, 2], [0, 7]]})").size() == 2.0);
}

TEST_CASE("large sets use the shared-node form") {
  GeneratorSpec spec;
  spec.kind = SetKind::kFourCornerCantor;
  spec.depth = 40;
  const CellSet s = generate(spec).set;
  const std::string text = set_to_json(s);
  const json j = json::parse(text);
  REQUIRE(j.contains("dag"));
  // children come before parents
  const auto& nodes = j["dag"]["nodes"];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (const auto& c : nodes[i][2]) {
      if (c.get<long long>() >= 0) CHECK(c.get<std::size_t>() < i);
    }
  }
  CHECK(j["dag"]["root"].get<std::size_t>() == nodes.size() - 1);
  CHECK(set_from_json(text) == s);
  CHECK(set_to_json(set_from_json(text)) == text);
}

TEST_CASE("measure round trip is exact") {
  Rng rng(3);
  const CellSet s = testing::random_cells(2, 5, 0.2, rng);
  const CellMeasure mu = build_frostman(s, vanishing_gauge(1));
  const CellMeasure back = measure_from_json(measure_to_json(mu));
  CHECK(back.entries() == mu.entries());
  CHECK(measure_to_json(back) == measure_to_json(mu));

  const CellMeasure deep = build_frostman(CellSet::full_cube(2, 30, DyadicCube::root(2)), power_gauge(1));
  const std::string text = measure_to_json(deep);
  CHECK(json::parse(text).contains("dag"));
  const CellMeasure deep_back = measure_from_json(text);
  CHECK(deep_back.total() == deep.total());
  CHECK(verify_frostman(deep_back, power_gauge(1)).pass);
  CHECK(measure_to_json(deep_back) == text);
}

TEST_CASE("certificate round trip") {
  GeneratorSpec spec;
  spec.kind = SetKind::kRandomSparse;
  spec.depth = 16;
  spec.seed = 4;
  const GeneratedSet g = generate(spec);
  const std::string text = certificate_to_json(*g.certificate);
  const SparsityCertificate back = certificate_from_json(text);
  CHECK(back.scales() == g.certificate->scales());
  CHECK(back.ell() == 4);
  for (std::size_t j = 0; j < back.scale_count(); ++j) CHECK(back.pairs(j) == g.certificate->pairs(j));
  CHECK(certificate_to_json(back) == text);
  CHECK(check_sparse(g.set, back));

  // dimension inferred from the pairs when "n" is absent
  json j = json::parse(text);
  j.erase("n");
  CHECK(certificate_from_json(j.dump()).dim() == 2);

  const Gauge h = power_excess_gauge(1, 0.5);
  const SparseResult res = build_sparse_measure(build_frostman(CellSet::full_cube(2, 40, DyadicCube::root(2)), h), h, 1, 4);
  const std::string big = certificate_to_json(res.certificate);
  const SparsityCertificate big_back = certificate_from_json(big);
  CHECK(big_back.scales() == std::vector<int>{17, 33});
  CHECK(certificate_to_json(big_back) == big);
  CHECK(check_sparse(res.measure.support(), big_back));
}

TEST_CASE("malformed input is rejected") {
  for (const char* bad : {"", "{", "[]", R"({"n": 2})", R"({"n": 2, "depth": 3, "cells": [[8, 0]]})",
                          R"({"n": 2, "depth": 3, "cells": [[1]]})", R"({"n": 0, "depth": 3, "cells": []})",
                          R"({"n": 2, "depth": 3, "dag": {"root": 0, "nodes": [[0, 0, [1, -1, -1, -1]], [3, 0, []]]}})"}) {
    try {
      set_from_json(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInvalidInput);
    }
  }
  CHECK_THROWS_AS(measure_from_json(R"({"n": 2, "depth": 1, "masses": [[[0, 0], -1]]})"), Error);
  CHECK_THROWS_AS(measure_from_json(R"({"n": 2, "depth": 1, "masses": [[[0, 0], "x"]]})"), Error);
  CHECK_THROWS_AS(certificate_from_json(R"({"ell": 2, "scales": [1], "families": []})"), Error);
  try {
    read_file("/nonexistent/path.json");
    FAIL("read a missing file");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "gmt_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "x.json").string();
  write_file(path, "abc\n");
  CHECK(read_file(path) == "abc\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("profile output") {
  BetaProfile p;
  p.center = {0.25, 0.5};
  p.levels = {1, 2};
  p.betas = {0.5, 0.0};
  p.square_function = 0.25 * std::log(2.0);
  const std::string csv = beta_profiles_to_csv({p});
  CHECK(csv == "point,x0,x1,j,r,beta\n0,0.25,0.5,1,0.5,0.5\n0,0.25,0.5,2,0.25,0\n");
  const json j = json::parse(beta_profiles_to_json({p}, 1));
  CHECK(j.dump().find("0.25") != std::string::npos);
}

TEST_CASE("domain pairs from JSON") {
  const DomainPair dp = domain_pair_from_json(
      R"({"plus": [[[-1, 0], [1, 0], [1, 1], [-1, 1]]], "minus": [[[-1, 0], [-1, -1], [1, -1], [1, 0]]]})");
  CHECK(dp(Point{0.0, 0.5}) == Side::kPlus);
  CHECK(dp(Point{0.0, -0.5}) == Side::kMinus);
  CHECK_THROWS_AS(domain_pair_from_json(R"({"plus": 3})"), Error);
}
