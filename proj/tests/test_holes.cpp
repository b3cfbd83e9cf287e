#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gmt/corpus.hpp"
#include "gmt/error.hpp"
#include "gmt/frostman.hpp"
#include "gmt/gauge.hpp"
#include "gmt/holes.hpp"
#include "gmt/sparsify.hpp"

using namespace gmt;

namespace {

SparseResult cantor_sparse(int depth) {
  GeneratorSpec spec;
  spec.kind = SetKind::kFourCornerCantor;
  spec.depth = depth;
  const Gauge h = power_excess_gauge(1, 0.5);
  return build_sparse_measure(build_frostman(generate(spec).set, h), h, 1, 4);
}

}  // namespace

TEST_CASE("random frames are orthonormal") {
  Rng rng(1);
  for (int n = 2; n <= 6; ++n) {
    for (int k = 1; k <= n; ++k) {
      AffinePlane p{Point(static_cast<std::size_t>(n), 0.5), random_frame(n, k, rng)};
      CHECK(p.rank() == k);
      CHECK_NOTHROW(validate_plane(p));
    }
  }
  CHECK_THROWS_AS(validate_plane(AffinePlane{{0.0, 0.0}, {{1.0, 1.0}}}), Error);
  CHECK_THROWS_AS(random_frame(2, 3, rng), Error);
}

TEST_CASE("single obstacle around x") {
  // obstacle [0, 1/16]^2, x at its center, disc radius 1/2
  const std::vector<Box> boxes{Box{{0.0, 0.0}, 1.0 / 16.0}};
  const Point x{1.0 / 32.0, 1.0 / 32.0};
  const Hole axis = search_hole(boxes, AffinePlane{x, {{1.0, 0.0}}}, 0.5, 65);
  CHECK(axis.clearance == doctest::Approx(15.0 / 32.0).epsilon(1e-12));
  const double s = std::sqrt(0.5);
  const Hole diag = search_hole(boxes, AffinePlane{x, {{s, s}}}, 0.5, 65);
  CHECK(diag.clearance == doctest::Approx(0.5 - std::sqrt(2.0) / 32.0).epsilon(1e-12));
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const Hole h = search_hole(boxes, AffinePlane{x, random_frame(2, 1, rng)}, 0.5, 65);
    CHECK(h.clearance >= 0.5 - std::sqrt(2.0) / 32.0 - 1e-12);
    CHECK(h.clearance <= 15.0 / 32.0 + 1e-12);
  }
}

TEST_CASE("no obstacles gives the base point") {
  const Point x{0.3, 0.4};
  const Hole h = search_hole(std::vector<Box>{}, AffinePlane{x, {{1.0, 0.0}}}, 0.5, 16);
  CHECK(h.y == x);
  CHECK(std::isinf(h.clearance));
  SparsityCertificate cert(2, 4);
  cert.add_scale(3, std::vector<std::pair<CubeIndex, CubeIndex>>{});
  const auto found = find_hole(cert, 0, AffinePlane{x, {{0.0, 1.0}}}, 10.0);
  REQUIRE(found);
  CHECK(std::isinf(found->clearance));
}

TEST_CASE("scale obstacles are the neighbouring selections") {
  SparsityCertificate cert(2, 2);
  cert.add_scale(2, std::vector<std::pair<CubeIndex, CubeIndex>>{
                        {{0, 0}, {1, 1}}, {{3, 3}, {15, 12}}, {{1, 2}, {4, 8}}});
  const Point x{0.1, 0.1};  // level-2 cube (0, 0)
  const auto obs = scale_obstacles(cert, 0, x);
  REQUIRE(obs.size() == 2);  // (3,3) is three steps away
  CHECK(obs[0].side == 1.0 / 16.0);
  CHECK_THROWS_AS(scale_obstacles(cert, 0, Point{1.0, 0.2}), Error);
}

TEST_CASE("find_hole honours the clearance target") {
  const SparseResult res = cantor_sparse(24);
  REQUIRE(res.certificate.scale_count() == 1);
  Rng rng(5);
  const CellSet support = res.measure.support();
  for (int t = 0; t < 20; ++t) {
    const DyadicCube c = *support.sample_cell(rng);
    const AffinePlane p{c.center(), random_frame(2, 1, rng)};
    CHECK(find_hole(res.certificate, 0, p, 0.0));
    CHECK_FALSE(find_hole(res.certificate, 0, p, 100.0));
    const auto h = find_hole(res.certificate, 0, p, 0.0);
    const auto again = find_hole(res.certificate, 0, p, h->clearance / cube_side(17));
    REQUIRE(again);
    CHECK(again->clearance == h->clearance);
  }
}

TEST_CASE("c0 estimate") {
  const C0Estimate e = estimate_c0(2, 1, 4, 10000, 64, 0);
  CHECK(e.c0 > 0.0);
  CHECK(e.c0 < 0.5);
  CHECK(e.ell_threshold == 4);
  CHECK_FALSE(e.below_threshold);
  MESSAGE("c0(n=2, k=1, ell=4) = " << e.c0);
  const C0Estimate low = estimate_c0(2, 1, 1, 2000, 32, 0);
  CHECK(low.below_threshold);
  CHECK(low.c0 >= 0.0);
  CHECK(estimate_c0(2, 1, 4, 500, 64, 9).c0 == estimate_c0(2, 1, 4, 500, 64, 9).c0);
  CHECK(estimate_c0(3, 1, 6, 200, 32, 0).c0 > 0.0);
  CHECK_THROWS_AS(estimate_c0(2, 2, 4, 10, 16, 0), Error);
}

TEST_CASE("witness on the sparse Cantor output") {
  const SparseResult res = cantor_sparse(28);
  REQUIRE(res.certificate.scale_count() >= 1);
  const double c0 = estimate_c0(2, 1, 4, 10000, 64, 1).c0;
  const WitnessReport w = witness_unrectifiability(res.measure.support(), res.certificate, 1, c0, 100, 64, 2);
  CHECK(w.sparse);
  CHECK(w.pass);
  CHECK(w.failures.empty());
  CHECK(w.checks == 100 * res.certificate.scale_count());
  CHECK(w.min_relative_clearance >= c0);
}

TEST_CASE("witness edge cases") {
  std::vector<CubeIndex> seg;
  for (std::int64_t i = 0; i < 64; ++i) seg.push_back({i, 0});
  const CellSet segment = CellSet::from_cells(2, 6, seg);
  SparsityCertificate fake(2, 2);
  fake.add_scale(1, std::vector<std::pair<CubeIndex, CubeIndex>>{{{0, 0}, {0, 0}}, {{1, 0}, {4, 0}}});
  const WitnessReport bad = witness_unrectifiability(segment, fake, 1, 0.1, 10);
  CHECK_FALSE(bad.sparse);
  CHECK_FALSE(bad.pass);
  CHECK(bad.checks == 0);

  const SparseResult res = cantor_sparse(24);
  const WitnessReport vac = witness_unrectifiability(res.measure.support(), res.certificate, 1, 0.0, 30);
  CHECK(vac.pass);
  CHECK(witness_unrectifiability(CellSet(2, 24), res.certificate, 1, 0.2, 10).pass);
  CHECK_THROWS_AS(witness_unrectifiability(segment, fake, 2, 0.1, 10), Error);
  CHECK_THROWS_AS(witness_unrectifiability(segment, fake, 1, -1.0, 10), Error);
}
