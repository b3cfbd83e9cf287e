#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gmt/carleson.hpp"
#include "gmt/error.hpp"

using namespace gmt;

namespace {

Point unit_angle(double th) { return {std::cos(th), std::sin(th)}; }

}  // namespace

TEST_CASE("sphere samples are unit vectors") {
  for (int d : {2, 3, 4, 5}) {
    for (const Point& p : sphere_points(d, 500)) {
      double s = 0.0;
      for (double v : p) s += v * v;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto a = normal_sequence(d, 37);
    const auto b = normal_sequence(d, 100);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
  // quasi-uniform: mean of the samples is near 0
  for (int d : {2, 3, 4}) {
    Point mean(static_cast<std::size_t>(d), 0.0);
    const auto pts = sphere_points(d, 20000);
    for (const Point& p : pts) {
      for (int a = 0; a < d; ++a) mean[a] += p[a] / pts.size();
    }
    for (double m : mean) CHECK(std::abs(m) < 0.02);
  }
}

TEST_CASE("halfspace pairs fit exactly") {
  for (double th : {0.0, 0.3, 1.1, 2.0, 4.4}) {
    const Point x{0.2, -0.7};
    const DomainPair dp = halfspace_pair(x, unit_angle(th));
    const EpsilonResult e = epsilon_n(dp, x, 0.5, 256, 100000);
    CHECK(e.value < 1e-3);
    CHECK(e.samples == 100000);
  }
  const Point x3{0.1, 0.2, 0.3};
  const EpsilonResult e3 = epsilon_n(halfspace_pair(x3, Point{0.3, -0.5, 0.8}), x3, 1.0, 256, 100000);
  CHECK(e3.value < 0.02);
  CHECK_THROWS_AS(halfspace_pair(x3, Point{0.0, 0.0, 0.0}), Error);
}

TEST_CASE("empty pair leaves the whole sphere uncovered") {
  const Point x{0.0, 0.0};
  const EpsilonResult e = epsilon_n(empty_pair(2), x, 0.25, 64, 100000);
  CHECK(e.value == doctest::Approx(2.0 * std::numbers::pi).epsilon(0.01));
  const EpsilonProfile p = epsilon_square_function(empty_pair(2), x, 0, 9, 16, 10000);
  // constant per scale: the sum is linear in the scale count
  const EpsilonProfile q = epsilon_square_function(empty_pair(2), x, 0, 19, 16, 10000);
  CHECK(q.square_function == doctest::Approx(2.0 * p.square_function).epsilon(1e-12));
  CHECK(p.square_function == doctest::Approx(10 * 4 * std::numbers::pi * std::numbers::pi * std::numbers::ln2).epsilon(0.02));
  const Point x3{0.0, 0.0, 0.0};
  CHECK(epsilon_n(empty_pair(3), x3, 1.0, 16, 50000).value == doctest::Approx(4.0 * std::numbers::pi).epsilon(0.01));
}

TEST_CASE("a single coarse normal against a tilted halfspace") {
  const Point x{0.0, 0.0};
  for (double phi : {0.05, 0.1, 0.2, 0.4}) {
    // the first normal of the sequence is e1; the true normal is e1 rotated by phi
    const DomainPair dp = halfspace_pair(x, unit_angle(phi));
    const EpsilonResult e = epsilon_n(dp, x, 1.0, 1, 100000);
    CHECK(e.coarse == doctest::Approx(2.0 * phi).epsilon(0.01));
    CHECK(e.value <= e.coarse);
  }
}

TEST_CASE("refinement and normal count are monotone") {
  const Point x{0.5, 0.5};
  const DomainPair dp = ball_pair(Point{0.5, 1.5}, 1.0);
  double previous = INFINITY;
  for (std::size_t normals : {1, 2, 4, 8, 16, 32, 64, 128, 256}) {
    const EpsilonResult e = epsilon_n(dp, x, 0.5, normals, 20000);
    CHECK(e.coarse <= previous);
    previous = e.coarse;
    REQUIRE(!e.stages.empty());
    CHECK(e.stages[0] <= e.coarse);
    for (std::size_t i = 1; i < e.stages.size(); ++i) CHECK(e.stages[i] <= e.stages[i - 1]);
    CHECK(e.value == e.stages.back());
  }
}

TEST_CASE("enlarging the domains never increases the coarse estimate") {
  const Point x{0.0, 0.0};
  const Point nu{0.0, 1.0};
  const DomainPair half = halfspace_pair(x, nu);
  // plus side with a disc removed, and the same with the disc restored
  const Point hole{0.3, 0.2};
  const DomainPair holed = custom_pair(
      2,
      [&](std::span<const double> y) {
        if (std::hypot(y[0] - hole[0], y[1] - hole[1]) < 0.15) return Side::kNeither;
        return half(y);
      },
      "holed");
  const DomainPair small = custom_pair(
      2, [&](std::span<const double> y) { return y[1] > 0.5 ? Side::kPlus : Side::kNeither; }, "strip");
  for (std::size_t normals : {4, 32, 256}) {
    const double a = epsilon_n(small, x, 0.6, normals, 20000).coarse;
    const double b = epsilon_n(holed, x, 0.4, normals, 20000).coarse;
    const double c = epsilon_n(half, x, 0.4, normals, 20000).coarse;
    const double e = epsilon_n(empty_pair(2), x, 0.4, normals, 20000).coarse;
    CHECK(c <= b);
    CHECK(b <= e);
    CHECK(a <= epsilon_n(empty_pair(2), x, 0.6, normals, 20000).coarse);
    CHECK(a > 0.0);
  }
}

TEST_CASE("ball boundary point: epsilon is O(r)") {
  const Point c{0.0, 0.0};
  const Point x{1.0, 0.0};
  const EpsilonProfile p = epsilon_square_function(ball_pair(c, 1.0), x, 2, 8, 256, 100000);
  for (std::size_t i = 1; i < p.values.size(); ++i) {
    CHECK(p.values[i] / p.values[i - 1] == doctest::Approx(0.5).epsilon(0.2));
  }
  CHECK(p.square_function < 0.1);
}

TEST_CASE("rotation invariance") {
  const double rot = 0.7;
  auto turn = [&](const Point& p) {
    return Point{std::cos(rot) * p[0] - std::sin(rot) * p[1], std::sin(rot) * p[0] + std::cos(rot) * p[1]};
  };
  const Point c{0.0, 0.0};
  const Point x{0.9, 0.3};
  const double a = epsilon_n(ball_pair(c, 1.0), x, 0.5, 256, 100000).value;
  const double b = epsilon_n(ball_pair(turn(c), 1.0), turn(x), 0.5, 256, 100000).value;
  CHECK(a == doctest::Approx(b).epsilon(0.01));
}

TEST_CASE("polygon pairs") {
  const std::vector<std::vector<Point>> plus{{{-1, 0}, {1, 0}, {1, 1}, {-1, 1}}};
  const std::vector<std::vector<Point>> minus{{{-1, 0}, {-1, -1}, {1, -1}, {1, 0}}};
  const DomainPair dp = polygon_pair(plus, minus);
  CHECK(dp(Point{0.0, 0.5}) == Side::kPlus);
  CHECK(dp(Point{0.0, -0.5}) == Side::kMinus);
  CHECK(dp(Point{2.0, 0.5}) == Side::kNeither);
  CHECK(epsilon_n(dp, Point{0.0, 0.0}, 0.5, 256, 100000).value < 1e-3);
  const std::vector<std::vector<Point>> overlapping{{{-1, -0.5}, {1, -0.5}, {1, 0.5}, {-1, 0.5}}};
  CHECK_THROWS_AS(polygon_pair(plus, overlapping), Error);
  const std::vector<std::vector<Point>> nested{{{-0.5, 0.2}, {0.5, 0.2}, {0.5, 0.8}}};
  CHECK_THROWS_AS(polygon_pair(plus, nested), Error);
  CHECK_THROWS_AS(polygon_pair({{{0, 0}, {1, 1}}}, {}), Error);
}
