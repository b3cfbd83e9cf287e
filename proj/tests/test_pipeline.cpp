#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "common.hpp"
#include "gmt/corpus.hpp"
#include "gmt/error.hpp"
#include "gmt/io.hpp"
#include "gmt/pipeline.hpp"

using namespace gmt;
using nlohmann::json;

namespace {

PipelineOptions quick() {
  PipelineOptions o;
  o.c0_trials = 2000;
  o.witness_samples = 40;
  o.beta_points = 3;
  return o;
}

std::string stage_of(const CellSet& s, const PipelineOptions& o) {
  try {
    extract_core(s, o);
  } catch (const Error& e) {
    return e.stage();
  }
  return "";
}

}  // namespace

TEST_CASE("full square passes every stage") {
  const CellSet square = CellSet::full_cube(2, 40, DyadicCube::root(2));
  const Bundle b = extract_core(square, quick());
  CHECK(b.ell == 4);
  CHECK(b.gauge_report.verdict);
  CHECK(b.frostman_report.pass);
  CHECK(b.sparse.certificate.scale_count() >= 2);
  CHECK(b.sparse.certificate.scale(0) == 17);
  CHECK(b.sparse_check);
  CHECK(b.caps.pass);
  CHECK(b.coarse_pass);
  CHECK(b.c0.c0 > 0.0);
  CHECK(b.witness.pass);
  CHECK(b.profiles.size() == 3);
  CHECK_FALSE(b.flat_input);
  CHECK(b.pass());

  const auto dir = std::filesystem::temp_directory_path() / "gmt_pipeline_square";
  std::filesystem::remove_all(dir);
  CHECK(write_report(b, dir.string()) == 0);
  for (const char* f : {"summary.json", "beta.csv", "certificate.json", "set.json", "frostman.json", "sparse.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  // stage outputs re-verify from their files alone
  const CellMeasure nu = measure_from_json(read_file((dir / "sparse.json").string()));
  const SparsityCertificate cert = certificate_from_json(read_file((dir / "certificate.json").string()));
  CHECK(check_sparse(nu.support(), cert));
  const CellMeasure mu = measure_from_json(read_file((dir / "frostman.json").string()));
  CHECK(verify_frostman(mu, parse_gauge(b.gauge_label)).pass);
  const json summary = json::parse(read_file((dir / "summary.json").string()));
  CHECK(summary["pass"] == true);
  CHECK(summary["sparsify"]["scales"][0] == 17);
  std::filesystem::remove_all(dir);
}

TEST_CASE("plane patch runs through and reads as flat") {
  GeneratorSpec spec;
  spec.kind = SetKind::kPlanePatch;
  spec.depth = 40;
  const Bundle b = extract_core(generate(spec).set, quick());
  CHECK(b.frostman_report.pass);
  CHECK(b.sparse_check);
  CHECK(b.caps.pass);
  CHECK(b.coarse_pass);
  CHECK(b.flat_input);
  for (double v : b.flatness) CHECK(v < 1e-12);
}

TEST_CASE("single cell is a trivial pass") {
  const CellSet s = testing::single_cell(2, 40, {std::int64_t{1} << 39, 12345});
  const Bundle b = extract_core(s, quick());
  CHECK(b.pass());
  CHECK(b.sparse.measure.entries().size() == 1);
  CHECK(b.sparse.measure.total() == doctest::Approx(1.0));
  for (std::size_t j = 0; j < b.sparse.certificate.scale_count(); ++j) CHECK(b.sparse.certificate.selection_count(j) == 1.0);
}

TEST_CASE("errors carry their stage") {
  const CellSet square = CellSet::full_cube(2, 40, DyadicCube::root(2));
  PipelineOptions o = quick();
  o.k = 2;
  CHECK(stage_of(square, o) == "input");
  o = quick();
  o.gauge = "bogus:1";
  CHECK(stage_of(square, o) == "gauge");
  o = quick();
  o.gauge = "power:1";
  CHECK(stage_of(square, o) == "sparsify");
  o = quick();
  o.depth = 12;
  CHECK(stage_of(square, o) == "sparsify");
  try {
    extract_core(square, o);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDepthBudget);
  }
  CHECK(stage_of(CellSet(2, 10), quick()) == "input");
}

TEST_CASE("depth override refines the input") {
  PipelineOptions o = quick();
  o.depth = 30;
  const Bundle b = extract_core(CellSet::full_cube(2, 3, DyadicCube::root(2)), o);
  CHECK(b.set.depth() == 30);
  CHECK(b.pass());
}

TEST_CASE("reruns and thread counts do not change the output") {
  GeneratorSpec spec;
  spec.kind = SetKind::kFourCornerCantor;
  spec.depth = 28;
  const CellSet s = generate(spec).set;
  PipelineOptions o = quick();
  o.seed = 17;
  setenv("GMT_THREADS", "1", 1);
  const std::string a = summary_json(extract_core(s, o));
  setenv("GMT_THREADS", "4", 1);
  const std::string b = summary_json(extract_core(s, o));
  unsetenv("GMT_THREADS");
  CHECK(a == b);
  o.seed = 18;
  CHECK(summary_json(extract_core(s, o)) != a);
}
