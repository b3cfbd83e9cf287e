#include "gmt/holes.hpp"

#include <algorithm>
#include <cmath>

#include "gmt/error.hpp"
#include "gmt/parallel.hpp"

namespace gmt {

namespace {

// Parameter points of the closed unit disc in R^k.
std::vector<Point> disc_grid(int k, int grid) {
  if (grid < 2) invalid_input("hole search: grid must be >= 2");
  std::vector<Point> pts;
  std::vector<int> c(static_cast<std::size_t>(k), 0);
  const double step = 2.0 / (grid - 1);
  while (true) {
    Point t(static_cast<std::size_t>(k));
    double norm2 = 0.0;
    for (int i = 0; i < k; ++i) {
      t[i] = -1.0 + step * c[i];
      norm2 += t[i] * t[i];
    }
    if (norm2 <= 1.0 + 1e-12) pts.push_back(std::move(t));
    int i = 0;
    while (i < k && ++c[i] == grid) c[i++] = 0;
    if (i == k) break;
  }
  return pts;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Hole search_grid(std::span<const Box> obstacles, const AffinePlane& plane, double radius, const std::vector<Point>& pts) {
  Hole best;
  if (obstacles.empty()) {
    best.y = plane.base;
    return best;
  }
  best.clearance = -1.0;
  Point scaled(static_cast<std::size_t>(plane.rank()));
  for (const Point& t : pts) {
    for (int i = 0; i < plane.rank(); ++i) scaled[i] = t[i] * radius;
    Point y = plane.at(scaled);
    double clear = std::numeric_limits<double>::infinity();
    for (const Box& b : obstacles) {
      clear = std::min(clear, box_distance(y, b.lo, b.side));
      if (clear <= best.clearance) break;
    }
    if (clear > best.clearance) {
      best.clearance = clear;
      best.y = std::move(y);
    }
  }
  return best;
}

void check_point(const SparsityCertificate& cert, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(cert.dim())) invalid_input("hole search: point has the wrong dimension");
  for (double v : x) {
    if (!(v >= 0.0 && v < 1.0)) invalid_input("hole search: point outside [0,1)^n");
  }
}

}  // namespace

Point AffinePlane::at(std::span<const double> t) const {
  Point p = base;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    for (std::size_t a = 0; a < p.size(); ++a) p[a] += t[i] * frame[i][a];
  }
  return p;
}

std::vector<Point> random_frame(int n, int k, Rng& rng) {
  if (k < 1 || k > n) invalid_input("random_frame: need 1 <= k <= n");
  std::vector<Point> frame;
  while (static_cast<int>(frame.size()) < k) {
    Point v(static_cast<std::size_t>(n));
    for (double& c : v) c = rng.normal();
    for (const Point& f : frame) {
      const double p = dot(v, f);
      for (int a = 0; a < n; ++a) v[a] -= p * f[a];
    }
    const double norm = std::sqrt(dot(v, v));
    if (norm < 1e-6) continue;
    for (double& c : v) c /= norm;
    frame.push_back(std::move(v));
  }
  return frame;
}

void validate_plane(const AffinePlane& plane) {
  const std::size_t n = plane.base.size();
  for (std::size_t i = 0; i < plane.frame.size(); ++i) {
    if (plane.frame[i].size() != n) invalid_input("plane: frame vector has the wrong dimension");
    for (std::size_t j = 0; j <= i; ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(dot(plane.frame[i], plane.frame[j]) - expect) > 1e-9) invalid_input("plane: frame is not orthonormal");
    }
  }
}

Hole search_hole(std::span<const Box> obstacles, const AffinePlane& plane, double radius, int grid) {
  validate_plane(plane);
  return search_grid(obstacles, plane, radius, disc_grid(plane.rank(), grid));
}

std::vector<Box> scale_obstacles(const SparsityCertificate& cert, std::size_t j, std::span<const double> x) {
  check_point(cert, x);
  const int n = cert.dim();
  const int L = cert.scale(j);
  const DyadicCube home = cube_at(x, L);
  const std::int64_t top = std::int64_t{1} << L;
  const double side = cube_side(L + cert.ell());
  std::vector<Box> out;
  std::vector<int> d(static_cast<std::size_t>(n), -2);
  while (true) {
    CubeIndex idx = home.index();
    bool inside = true;
    for (int i = 0; i < n; ++i) {
      idx[i] += d[i];
      inside = inside && idx[i] >= 0 && idx[i] < top;
    }
    if (inside) {
      if (auto sel = cert.selected(j, DyadicCube(n, L, idx))) out.push_back(Box{sel->lower_corner(), side});
    }
    int i = 0;
    while (i < n && ++d[i] == 3) d[i++] = -2;
    if (i == n) break;
  }
  return out;
}

std::optional<Hole> find_hole(const SparsityCertificate& cert, std::size_t j, const AffinePlane& plane, double c_target,
                              int grid) {
  validate_plane(plane);
  const std::vector<Box> obstacles = scale_obstacles(cert, j, plane.base);
  const double s = cube_side(cert.scale(j));
  Hole h = search_grid(obstacles, plane, 0.5 * s, disc_grid(plane.rank(), grid));
  if (h.clearance < c_target * s) return std::nullopt;
  return h;
}

C0Estimate estimate_c0(int n, int k, int ell, std::size_t trials, int grid, std::uint64_t seed) {
  if (n < 2 || k < 1 || k >= n) invalid_input("estimate_c0: need 1 <= k < n");
  if (ell < 1 || ell > 30) invalid_input("estimate_c0: ell out of range");
  if (trials == 0) invalid_input("estimate_c0: need at least one trial");
  C0Estimate est;
  est.trials = trials;
  est.grid = grid;
  est.ell_threshold = min_sparsity_parameter(n, k, k == 1 ? AlphaMode::kExactDiagonal : AlphaMode::kBallBound);
  est.below_threshold = ell < est.ell_threshold;
  const std::vector<Point> pts = disc_grid(k, grid);
  const double sub = std::ldexp(1.0, -ell);
  const std::uint64_t cells = std::uint64_t{1} << ell;
  std::vector<double> best(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(mix_seed(seed, t));
    std::vector<Box> obstacles;
    Point x(static_cast<std::size_t>(n));
    std::vector<int> d(static_cast<std::size_t>(n), -2);
    while (true) {
      Box b{Point(static_cast<std::size_t>(n)), sub};
      bool home = true;
      for (int i = 0; i < n; ++i) {
        b.lo[i] = d[i] + sub * static_cast<double>(rng.below(cells));
        home = home && d[i] == 0;
      }
      if (home) {
        for (int i = 0; i < n; ++i) x[i] = b.lo[i] + sub * rng.uniform();
      }
      obstacles.push_back(std::move(b));
      int i = 0;
      while (i < n && ++d[i] == 3) d[i++] = -2;
      if (i == n) break;
    }
    AffinePlane plane{x, random_frame(n, k, rng)};
    best[t] = search_grid(obstacles, plane, 0.5, pts).clearance;
  });
  est.c0 = *std::min_element(best.begin(), best.end());
  return est;
}

WitnessReport witness_unrectifiability(const CellSet& set, const SparsityCertificate& cert, int k, double c0,
                                       std::size_t samples, int grid, std::uint64_t seed) {
  if (set.dim() != cert.dim()) invalid_input("witness: dimension mismatch");
  if (k < 1 || k >= set.dim()) invalid_input("witness: need 1 <= k < n");
  if (c0 < 0.0) invalid_input("witness: c0 must be nonnegative");
  WitnessReport rep;
  rep.c0 = c0;
  rep.samples = samples;
  rep.sparse = check_sparse(set, cert);
  if (!rep.sparse) return rep;
  if (set.empty()) {
    rep.pass = true;
    return rep;
  }
  const std::size_t scales = cert.scale_count();
  rep.per_scale_min.assign(scales, std::numeric_limits<double>::infinity());
  const std::vector<Point> pts = disc_grid(k, grid);
  const int n = set.dim();

  std::vector<std::vector<double>> clear(samples, std::vector<double>(scales));
  std::vector<Point> xs(samples);
  parallel_for(samples, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    const DyadicCube cell = *set.sample_cell(rng);
    Point x = cell.lower_corner();
    const double side = cell.side();
    for (int a = 0; a < n; ++a) x[a] += side * rng.uniform();
    AffinePlane plane{x, random_frame(n, k, rng)};
    for (std::size_t j = 0; j < scales; ++j) {
      const std::vector<Box> obstacles = scale_obstacles(cert, j, x);
      const double s = cube_side(cert.scale(j));
      clear[i][j] = search_grid(obstacles, plane, 0.5 * s, pts).clearance / s;
    }
    xs[i] = std::move(x);
  });

  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t j = 0; j < scales; ++j) {
      ++rep.checks;
      const double c = clear[i][j];
      rep.per_scale_min[j] = std::min(rep.per_scale_min[j], c);
      rep.min_relative_clearance = std::min(rep.min_relative_clearance, c);
      if (c < c0) rep.failures.push_back(WitnessFailure{i, j, xs[i], c});
    }
  }
  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace gmt
