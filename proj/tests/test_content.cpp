#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "common.hpp"
#include "gmt/content.hpp"
#include "gmt/corpus.hpp"
#include "gmt/error.hpp"
#include "gmt/gauge.hpp"

using namespace gmt;

namespace {

const Gauge kLinear([](double r) { return r; }, "r");
const Gauge kSquare([](double r) { return r * r; }, "r^2");

CellSet segment(int depth) {
  std::vector<CubeIndex> cells;
  for (std::int64_t i = 0; i < (std::int64_t{1} << depth); ++i) cells.push_back({i, 0});
  return CellSet::from_cells(2, depth, cells);
}

// Minimum of sum h(diam) over every family of dyadic cubes (levels in
// [min_level, depth]) whose union contains E. E has at most 64 cells.
double brute_cover(const CellSet& set, const Gauge& h, int min_level) {
  const int n = set.dim();
  const int m = set.depth();
  const auto cells = set.cells();
  std::vector<std::uint64_t> masks;
  std::vector<double> costs;
  for (int l = min_level; l <= m; ++l) {
    for (const auto& q : DyadicCube::root(n).descendants(l)) {
      std::uint64_t mask = 0;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (q.contains(DyadicCube(n, m, cells[i]))) mask |= std::uint64_t{1} << i;
      }
      if (mask == 0) continue;
      masks.push_back(mask);
      costs.push_back(h(q.diameter()));
    }
  }
  REQUIRE(masks.size() <= 24);
  const std::uint64_t full = cells.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << cells.size()) - 1;
  double best = INFINITY;
  for (std::uint64_t pick = 1; pick < (std::uint64_t{1} << masks.size()); ++pick) {
    std::uint64_t cov = 0;
    double c = 0.0;
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if ((pick >> i) & 1) {
        cov |= masks[i];
        c += costs[i];
      }
    }
    if (cov == full && c < best) best = c;
  }
  return best;
}

}  // namespace

TEST_CASE("segment cover costs sqrt 2 at every min level") {
  const CellSet s = segment(4);
  for (int l = 0; l <= 4; ++l) CHECK(dyadic_cover_value(s, kLinear, l) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const CoverSolution sol = dyadic_cover_cost(s, kLinear, 0);
  // ties keep the shallower cube
  REQUIRE(sol.cover.size() == 1);
  CHECK(sol.cover[0] == DyadicCube::root(2));
  for (double v : measure_profile(s, kLinear)) CHECK(v == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("full square with r^2 ties at 2") {
  const CellSet s = CellSet::full_cube(2, 5, DyadicCube::root(2));
  for (int l = 0; l <= 5; ++l) CHECK(dyadic_cover_value(s, kSquare, l) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(content(s, kSquare) == doctest::Approx(2.0));
  const CellSet deep = CellSet::full_cube(2, 40, DyadicCube::root(2));
  CHECK(content(deep, kSquare) == doctest::Approx(2.0));
  CHECK(dyadic_cover_value(deep, kSquare, 40) == doctest::Approx(2.0));
}

TEST_CASE("single cell") {
  const CellSet s = testing::single_cell(2, 5, {7, 19});
  const auto profile = measure_profile(s, kLinear);
  CHECK(profile[5] == doctest::Approx(cube_diameter(2, 5)));
  // the cell itself is always allowed and is the cheapest cube
  for (int l = 0; l <= 5; ++l) CHECK(profile[l] == doctest::Approx(cube_diameter(2, 5)));
  const CoverSolution sol = dyadic_cover_cost(s, kLinear, 2);
  REQUIRE(sol.cover.size() == 1);
  CHECK(sol.cover[0] == DyadicCube(2, 5, {7, 19}));
}

TEST_CASE("empty set and argument errors") {
  const CellSet e(2, 4);
  CHECK(content(e, kLinear) == 0.0);
  CHECK(dyadic_cover_cost(e, kLinear, 2).cover.empty());
  CHECK_THROWS_AS(dyadic_cover_value(segment(3), kLinear, 4), Error);
  CHECK_THROWS_AS(dyadic_cover_value(segment(3), kLinear, -1), Error);
}

TEST_CASE("cover budget") {
  const CellSet s = CellSet::full_cube(2, 12, DyadicCube::root(2));
  CHECK_THROWS_AS(dyadic_cover_cost(s, kSquare, 12, 1000), Error);
  try {
    dyadic_cover_cost(s, kSquare, 12, 1000);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDepthBudget);
  }
}

TEST_CASE("tree DP agrees with exhaustive cover enumeration") {
  Rng rng(2024);
  const Gauge gauges[] = {kLinear, kSquare, power_gauge(1), vanishing_gauge(1),
                          Gauge([](double r) { return std::pow(r, 1.3); }, "r^1.3")};
  for (int t = 0; t < 12; ++t) {
    const CellSet s = testing::random_cells(2, 2, 0.35, rng);
    for (const Gauge& h : gauges) {
      for (int l = 0; l <= 2; ++l) {
        const double brute = brute_cover(s, h, l);
        CHECK(dyadic_cover_value(s, h, l) == doctest::Approx(brute).epsilon(1e-12));
        const CoverSolution sol = dyadic_cover_cost(s, h, l);
        double sum = 0.0;
        for (const auto& q : sol.cover) {
          CHECK(q.level() >= l);
          sum += h(q.diameter());
        }
        CHECK(sum == doctest::Approx(sol.cost).epsilon(1e-12));
      }
    }
  }
  for (int t = 0; t < 6; ++t) {
    const CellSet s = testing::random_cells(3, 1, 0.5, rng);
    for (const Gauge& h : gauges) CHECK(content(s, h) == doctest::Approx(brute_cover(s, h, 0)).epsilon(1e-12));
  }
}

TEST_CASE("cover is a disjoint cover of the set") {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const CellSet s = testing::random_cells(2, 5, 0.2, rng);
    const CoverSolution sol = dyadic_cover_cost(s, Gauge([](double r) { return std::pow(r, 1.5); }, "r^1.5"), 1);
    for (const auto& c : s.cells()) {
      int hits = 0;
      for (const auto& q : sol.cover) hits += q.contains(DyadicCube(2, 5, c)) ? 1 : 0;
      CHECK(hits == 1);
    }
    for (const auto& q : sol.cover) CHECK(s.meets(q));
  }
}

TEST_CASE("profile is nondecreasing") {
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const CellSet s = testing::random_cells(2, 6, 0.1, rng);
    for (const Gauge& h : {kLinear, kSquare, vanishing_gauge(1)}) {
      const auto p = measure_profile(s, h);
      for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] >= p[i - 1] * (1.0 - 1e-14));
    }
  }
}

TEST_CASE("explicit cell list DP matches the tree DP") {
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    const CellSet s = testing::random_cells(2, 6, 0.15, rng);
    auto cells = s.cells();
    cells.push_back(cells.front());  // duplicates are tolerated
    for (const Gauge& h : {kLinear, kSquare, power_gauge(1)}) {
      for (int l : {0, 3, 6}) {
        CHECK(cover_value_of_cells(2, 6, cells, h, l) == doctest::Approx(dyadic_cover_value(s, h, l)).epsilon(1e-12));
      }
    }
  }
  CHECK(cover_value_of_cells(2, 6, std::vector<CubeIndex>{}, kLinear) == 0.0);
  CHECK_THROWS_AS(cover_value_of_cells(2, 40, std::vector<CubeIndex>{{0, 0}}, kLinear), Error);
}

TEST_CASE("four-corner Cantor content with h(r) = r") {
  GeneratorSpec spec;
  spec.kind = SetKind::kFourCornerCantor;
  spec.depth = 6;
  const CellSet s = generate(spec).set;
  // every generation trades one cube for four of a quarter the size
  CHECK(content(s, kLinear) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(content(s, kSquare) == doctest::Approx(64.0 * 2.0 / 4096.0).epsilon(1e-14));
}
