#include "gmt/beta.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "gmt/content.hpp"
#include "gmt/error.hpp"
#include "gmt/gauge.hpp"

namespace gmt {

namespace {

constexpr double kBallTolerance = 1e-12;

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) invalid_input("beta: radius must be positive");
}

// Distance from p to the plane.
double plane_distance(std::span<const double> p, const AffinePlane& plane) {
  Point v(p.begin(), p.end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= plane.base[i];
  double along = 0.0;
  for (const Point& f : plane.frame) along += dot(v, f) * dot(v, f);
  return std::sqrt(std::max(0.0, dot(v, v) - along));
}

// Completes an orthonormal frame to a basis; returns the added vectors.
std::vector<Point> normal_directions(const std::vector<Point>& frame, int n) {
  std::vector<Point> all = frame;
  std::vector<Point> out;
  for (int e = 0; e < n && static_cast<int>(all.size()) < n; ++e) {
    Point v(static_cast<std::size_t>(n), 0.0);
    v[e] = 1.0;
    for (const Point& f : all) {
      const double p = dot(v, f);
      for (int a = 0; a < n; ++a) v[a] -= p * f[a];
    }
    const double norm = std::sqrt(dot(v, v));
    if (norm < 1e-8) continue;
    for (double& c : v) c /= norm;
    all.push_back(v);
    out.push_back(std::move(v));
  }
  return out;
}

// Minimizes f on [lo, hi]; returns the best argument seen.
double golden_min(const std::function<double(double)>& f, double lo, double hi, int iterations, double& best_value) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  double best = fc <= fd ? c : d;
  best_value = std::min(fc, fd);
  for (int it = 0; it < iterations; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
      if (fc < best_value) best_value = fc, best = c;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
      if (fd < best_value) best_value = fd, best = d;
    }
  }
  return best;
}

}  // namespace

Moments PointCloud::ball(std::span<const double> x, double r) const {
  if (static_cast<int>(x.size()) != dim) invalid_input("point cloud: center dimension mismatch");
  const double reach2 = r * r * (1.0 + kBallTolerance) * (1.0 + kBallTolerance);
  const std::size_t n = static_cast<std::size_t>(dim);
  Moments m(dim);
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (weights[p] > 0.0 && dist2(points[p], x) <= reach2) m.mass += weights[p];
  }
  if (m.mass <= 0.0) return m;
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (weights[p] <= 0.0 || dist2(points[p], x) > reach2) continue;
    for (std::size_t i = 0; i < n; ++i) m.centroid[i] += weights[p] * points[p][i];
  }
  for (double& c : m.centroid) c /= m.mass;
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (weights[p] <= 0.0 || dist2(points[p], x) > reach2) continue;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        m.scatter[i * n + j] += weights[p] * (points[p][i] - m.centroid[i]) * (points[p][j] - m.centroid[j]);
      }
    }
  }
  return m;
}

PointCloud circle_cloud(std::size_t count, std::span<const double> center, double radius) {
  if (center.size() != 2) invalid_input("circle_cloud: center must be planar");
  if (count == 0 || !(radius > 0.0)) invalid_input("circle_cloud: need points and a positive radius");
  PointCloud c;
  c.dim = 2;
  const double w = 2.0 * std::numbers::pi * radius / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double th = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    c.points.push_back({center[0] + radius * std::cos(th), center[1] + radius * std::sin(th)});
    c.weights.push_back(w);
  }
  return c;
}

AffineFit best_affine_fit(const Moments& m, int k, std::span<const double> fallback_base) {
  const int n = static_cast<int>(m.centroid.size());
  if (k < 0 || k > n) invalid_input("best_affine_fit: need 0 <= k <= n");
  AffineFit fit;
  fit.mass = m.mass;
  if (m.mass <= 0.0) {
    fit.plane.base.assign(fallback_base.begin(), fallback_base.end());
    for (int i = 0; i < k; ++i) {
      Point e(static_cast<std::size_t>(n), 0.0);
      e[i] = 1.0;
      fit.plane.frame.push_back(std::move(e));
    }
    return fit;
  }
  fit.empty = false;
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s(i, j) = 0.5 * (m.scatter[i * n + j] + m.scatter[j * n + i]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const Eigen::VectorXd& vals = eig.eigenvalues();
  double residual = 0.0;
  for (int i = 0; i < n - k; ++i) residual += std::max(0.0, vals(i));
  fit.residual = residual;
  fit.plane.base = m.centroid;
  for (int i = n - 1; i >= n - k; --i) {
    Point f(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) f[a] = eig.eigenvectors()(a, i);
    fit.plane.frame.push_back(std::move(f));
  }
  return fit;
}

AffineFit best_affine_fit(const MeasureIndex& mu, std::span<const double> x, double r, int k) {
  check_radius(r);
  return best_affine_fit(mu.ball(x, r), k, x);
}

AffineFit best_affine_fit(const PointCloud& mu, std::span<const double> x, double r, int k) {
  check_radius(r);
  return best_affine_fit(mu.ball(x, r), k, x);
}

double plane_residual(const Moments& m, const AffinePlane& plane) {
  if (m.mass <= 0.0) return 0.0;
  const std::size_t n = m.centroid.size();
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += m.scatter[i * n + i];
  for (const Point& f : plane.frame) {
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) q += f[i] * m.scatter[i * n + j] * f[j];
    }
    trace -= q;
  }
  const double off = plane_distance(m.centroid, plane);
  return std::max(0.0, trace) + m.mass * off * off;
}

double beta2(const MeasureIndex& mu, std::span<const double> x, double r, int k) {
  const AffineFit fit = best_affine_fit(mu, x, r, k);
  return std::sqrt(fit.residual / std::pow(r, k + 2));
}

double beta2(const PointCloud& mu, std::span<const double> x, double r, int k) {
  const AffineFit fit = best_affine_fit(mu, x, r, k);
  return std::sqrt(fit.residual / std::pow(r, k + 2));
}

double dyadic_square_sum(std::span<const double> betas) {
  double s = 0.0;
  for (double b : betas) s += b * b * std::numbers::ln2;
  return s;
}

namespace {

template <class Measure>
BetaProfile profile_of(const Measure& mu, std::span<const double> x, int k, int j_min, int j_max) {
  if (j_min > j_max || j_min < -kMaxLevel || j_max > kMaxLevel) invalid_input("square_function: bad scale range");
  BetaProfile p;
  p.center.assign(x.begin(), x.end());
  for (int j = j_min; j <= j_max; ++j) {
    p.levels.push_back(j);
    p.betas.push_back(beta2(mu, x, std::ldexp(1.0, -j), k));
  }
  p.square_function = dyadic_square_sum(p.betas);
  return p;
}

}  // namespace

BetaProfile square_function(const MeasureIndex& mu, std::span<const double> x, int k, int j_min, int j_max) {
  return profile_of(mu, x, k, j_min, j_max);
}

BetaProfile square_function(const PointCloud& mu, std::span<const double> x, int k, int j_min, int j_max) {
  return profile_of(mu, x, k, j_min, j_max);
}

double content_beta_for_plane(std::span<const CubeIndex> cells, int dim, int level, const AffinePlane& plane, double r,
                              int k, int t_grid) {
  check_radius(r);
  if (t_grid < 2) invalid_input("content_beta: t_grid must be >= 2");
  if (cells.empty()) return 0.0;
  const double side = cube_side(level);
  std::vector<std::pair<double, std::size_t>> by_dist;
  by_dist.reserve(cells.size());
  Point c(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (int a = 0; a < dim; ++a) c[a] = (static_cast<double>(cells[i][a]) + 0.5) * side;
    by_dist.emplace_back(plane_distance(c, plane), i);
  }
  std::sort(by_dist.begin(), by_dist.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const double max_dist = by_dist.front().first;
  const Gauge h = power_gauge(k);

  std::vector<double> ts;
  const double t0 = std::ldexp(r, -t_grid);
  const double ratio = std::pow(2.0, static_cast<double>(t_grid) / (t_grid - 1));
  for (double t = t0; ts.size() < static_cast<std::size_t>(t_grid) || t < max_dist; t *= ratio) ts.push_back(t);
  // by_dist is descending, so {dist > t} is a prefix that shrinks as t grows
  std::vector<double> hv(ts.size(), 0.0);
  std::vector<CubeIndex> sub;
  std::size_t cnt = by_dist.size();
  std::size_t last_cnt = 0;
  double last_value = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    while (cnt > 0 && by_dist[cnt - 1].first <= ts[i]) --cnt;
    if (cnt != last_cnt) {
      sub.clear();
      for (std::size_t q = 0; q < cnt; ++q) sub.push_back(cells[by_dist[q].second]);
      last_value = cnt == 0 ? 0.0 : cover_value_of_cells(dim, level, sub, h, 0);
      last_cnt = cnt;
    }
    hv[i] = last_value;
  }
  double integral = hv[0] * t0 * t0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    integral += 0.5 * (2.0 * ts[i] * hv[i] + 2.0 * ts[i + 1] * hv[i + 1]) * (ts[i + 1] - ts[i]);
  }
  return std::sqrt(integral / std::pow(r, k + 2));
}

ContentBetaResult content_beta(const CellSet& set, std::span<const double> x, double r, int k, int plane_grid, int t_grid,
                               std::uint64_t seed, int resolution) {
  check_radius(r);
  const int n = set.dim();
  if (static_cast<int>(x.size()) != n) invalid_input("content_beta: center dimension mismatch");
  if (k < 1 || k >= n) invalid_input("content_beta: need 1 <= k < n");
  if (plane_grid < 1) invalid_input("content_beta: plane_grid must be positive");
  ContentBetaResult res;
  res.plane.base.assign(x.begin(), x.end());
  if (set.empty()) return res;

  const int base = r < 1.0 ? static_cast<int>(std::ceil(-std::log2(r))) : 0;
  if (resolution < 0) invalid_input("content_beta: resolution must be nonnegative");
  const int level = std::min({set.depth(), base + resolution, 63 / n});
  const CellSet coarse = set.coarsened(level);
  const CellTree& t = coarse.tree();
  const double reach = r * (1.0 + kBallTolerance);
  std::vector<CubeIndex> cells;
  std::function<void(NodeId, const DyadicCube&)> collect = [&](NodeId id, const DyadicCube& cube) {
    if (box_distance(x, cube.lower_corner(), cube.side()) > reach) return;
    if (t.is_leaf(id)) {
      const Point c = cube.center();
      if (std::sqrt(dist2(c, x)) <= reach) cells.push_back(cube.index());
      return;
    }
    for (unsigned s = 0; s < t.fanout(); ++s) {
      const NodeId ch = t.child(id, s);
      if (ch != kNoNode) collect(ch, cube.child(s));
    }
  };
  collect(t.root(), DyadicCube::root(n));
  res.cells = cells.size();
  if (cells.empty()) return res;

  // barycenter and principal plane of the cell centers
  Moments m(n);
  {
    PointCloud pc;
    pc.dim = n;
    const double side = cube_side(level);
    for (const CubeIndex& c : cells) {
      Point p(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) p[a] = (static_cast<double>(c[a]) + 0.5) * side;
      pc.points.push_back(std::move(p));
      pc.weights.push_back(1.0);
    }
    m = pc.ball(x, 2.0 * r + 1.0);
  }
  const AffineFit pca = best_affine_fit(m, k, x);

  double best = std::numeric_limits<double>::infinity();
  auto eval = [&](const AffinePlane& p) {
    ++res.evaluations;
    const double v = content_beta_for_plane(cells, n, level, p, r, k, t_grid);
    if (v < best) {
      best = v;
      res.plane = p;
    }
    return v;
  };
  eval(pca.plane);

  if (n == 2 && k == 1) {
    auto line = [&](double theta, double offset) {
      AffinePlane p;
      const double c = std::cos(theta), s = std::sin(theta);
      p.base = {m.centroid[0] - s * offset, m.centroid[1] + c * offset};
      p.frame = {{c, s}};
      return p;
    };
    for (int i = 0; i < plane_grid; ++i) eval(line(std::numbers::pi * i / plane_grid, 0.0));
    const Point& f = res.plane.frame[0];
    double theta = std::atan2(f[1], f[0]);
    if (theta < 0.0) theta += std::numbers::pi;
    double offset = 0.0;
    double width = std::numbers::pi / plane_grid;
    for (int round = 0; round < 2; ++round) {
      double v;
      offset = golden_min([&](double o) { return eval(line(theta, o)); }, offset - 0.5 * r, offset + 0.5 * r, 18, v);
      theta = golden_min([&](double th) { return eval(line(th, offset)); }, theta - width, theta + width, 14, v);
      width *= 0.5;
    }
  } else {
    Rng rng(seed);
    for (int i = 0; i < plane_grid; ++i) eval(AffinePlane{m.centroid, random_frame(n, k, rng)});
    AffinePlane start = res.plane;
    for (const Point& nd : normal_directions(start.frame, n)) {
      auto shifted = [&](double o) {
        AffinePlane p = start;
        for (int a = 0; a < n; ++a) p.base[a] += o * nd[a];
        return p;
      };
      double v;
      const double o = golden_min([&](double s) { return eval(shifted(s)); }, -0.5 * r, 0.5 * r, 18, v);
      start = shifted(o);
    }
  }
  res.value = best;
  return res;
}

}  // namespace gmt
