#include "gmt/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gmt/error.hpp"
#include "gmt/parallel.hpp"

namespace gmt {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
constexpr int kMaxRefineRounds = 8;

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, x = 0.0;
  while (i > 0) {
    x += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return x;
}

// Acklam's rational approximation of the standard normal quantile.
double inverse_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double lo = 0.02425;
  if (p < lo) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - lo) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(Point& v) {
  const double n = std::sqrt(dot(v, v));
  for (double& c : v) c /= n;
}

Point halton_direction(int d, std::uint64_t i) {
  if (d > static_cast<int>(std::size(kPrimes))) invalid_input("sphere points: dimension too large");
  Point v(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) v[a] = inverse_normal_cdf(radical_inverse(i, kPrimes[a]));
  normalize(v);
  return v;
}

// Area of the unit sphere in R^d.
double sphere_area(int d) { return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d); }

// Orthonormal basis of the tangent space at unit vector v.
std::vector<Point> tangent_basis(const Point& v) {
  const int d = static_cast<int>(v.size());
  std::vector<Point> all{v};
  std::vector<Point> out;
  for (int e = 0; e < d && static_cast<int>(all.size()) < d; ++e) {
    Point w(static_cast<std::size_t>(d), 0.0);
    w[e] = 1.0;
    for (const Point& f : all) {
      const double p = dot(w, f);
      for (int a = 0; a < d; ++a) w[a] -= p * f[a];
    }
    if (std::sqrt(dot(w, w)) < 1e-8) continue;
    normalize(w);
    all.push_back(w);
    out.push_back(std::move(w));
  }
  return out;
}

double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool segments_cross(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool inside_polygon(const std::vector<Point>& poly, std::span<const double> p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a[1] > p[1]) != (b[1] > p[1])) {
      const double xc = (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0];
      if (p[0] < xc) in = !in;
    }
  }
  return in;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const double ux = b[0] - a[0], uy = b[1] - a[1];
  const double len2 = ux * ux + uy * uy;
  double t = len2 > 0.0 ? ((p[0] - a[0]) * ux + (p[1] - a[1]) * uy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * ux, p[1] - a[1] - t * uy);
}

double boundary_distance(const std::vector<Point>& poly, const Point& p) {
  double d = INFINITY;
  for (std::size_t i = 0; i < poly.size(); ++i) d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

// Probes just off every edge midpoint and vertex; a probe strictly inside
// both polygons means the interiors meet. Shared edges are not overlaps.
bool interiors_meet(const std::vector<Point>& a, const std::vector<Point>& b) {
  for (const auto* poly : {&a, &b}) {
    for (std::size_t i = 0; i < poly->size(); ++i) {
      const Point& p = (*poly)[i];
      const Point& q = (*poly)[(i + 1) % poly->size()];
      const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
      if (!(len > 0.0)) continue;
      const double delta = 1e-6 * len;
      const Point n{-(q[1] - p[1]) / len, (q[0] - p[0]) / len};
      std::vector<Point> probes{p};
      for (double side : {-1.0, 1.0}) {
        probes.push_back({0.5 * (p[0] + q[0]) + side * delta * n[0], 0.5 * (p[1] + q[1]) + side * delta * n[1]});
      }
      for (const Point& x : probes) {
        if (boundary_distance(a, x) > 0.5 * delta && boundary_distance(b, x) > 0.5 * delta && inside_polygon(a, x) &&
            inside_polygon(b, x))
          return true;
      }
    }
  }
  return false;
}

bool inside_any(const std::vector<std::vector<Point>>& polys, std::span<const double> p) {
  return std::any_of(polys.begin(), polys.end(), [&](const auto& poly) { return inside_polygon(poly, p); });
}

}  // namespace

DomainPair halfspace_pair(std::span<const double> point, std::span<const double> normal) {
  if (point.size() != normal.size() || point.size() < 2) invalid_input("halfspace_pair: bad dimensions");
  Point p(point.begin(), point.end());
  Point nu(normal.begin(), normal.end());
  if (!(std::sqrt(dot(nu, nu)) > 0.0)) invalid_input("halfspace_pair: zero normal");
  normalize(nu);
  DomainPair dp;
  dp.ambient = static_cast<int>(p.size());
  dp.label = "halfspace";
  dp.oracle = [p, nu](std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (y[i] - p[i]) * nu[i];
    return s > 0.0 ? Side::kPlus : s < 0.0 ? Side::kMinus : Side::kNeither;
  };
  return dp;
}

DomainPair ball_pair(std::span<const double> center, double radius) {
  if (center.size() < 2 || !(radius > 0.0)) invalid_input("ball_pair: bad ball");
  Point c(center.begin(), center.end());
  DomainPair dp;
  dp.ambient = static_cast<int>(c.size());
  dp.label = "ball";
  dp.oracle = [c, radius](std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += (y[i] - c[i]) * (y[i] - c[i]);
    const double d = std::sqrt(s);
    return d < radius ? Side::kPlus : d > radius ? Side::kMinus : Side::kNeither;
  };
  return dp;
}

DomainPair empty_pair(int ambient) {
  if (ambient < 2) invalid_input("empty_pair: ambient dimension must be >= 2");
  return DomainPair{ambient, [](std::span<const double>) { return Side::kNeither; }, "empty"};
}

DomainPair polygon_pair(const std::vector<std::vector<Point>>& plus, const std::vector<std::vector<Point>>& minus) {
  for (const auto* group : {&plus, &minus}) {
    for (const auto& poly : *group) {
      if (poly.size() < 3) invalid_input("polygon_pair: polygon needs at least 3 vertices");
      for (const Point& v : poly) {
        if (v.size() != 2 || !std::isfinite(v[0]) || !std::isfinite(v[1])) invalid_input("polygon_pair: bad vertex");
      }
    }
  }
  for (const auto& a : plus) {
    for (const auto& b : minus) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
          if (segments_cross(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]))
            invalid_input("polygon_pair: plus and minus polygons overlap");
        }
      }
      if (interiors_meet(a, b)) invalid_input("polygon_pair: plus and minus polygons overlap");
    }
  }
  DomainPair dp;
  dp.ambient = 2;
  dp.label = "polygon";
  dp.oracle = [plus, minus](std::span<const double> y) {
    if (inside_any(plus, y)) return Side::kPlus;
    if (inside_any(minus, y)) return Side::kMinus;
    return Side::kNeither;
  };
  return dp;
}

DomainPair custom_pair(int ambient, std::function<Side(std::span<const double>)> oracle, std::string label) {
  if (ambient < 2 || !oracle) invalid_input("custom_pair: bad oracle");
  return DomainPair{ambient, std::move(oracle), std::move(label)};
}

std::vector<Point> sphere_points(int d, std::size_t count) {
  if (d < 2) invalid_input("sphere_points: dimension must be >= 2");
  std::vector<Point> pts;
  pts.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    if (d == 2) {
      const double th = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
      pts.push_back({std::cos(th), std::sin(th)});
    } else if (d == 3) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i);
      pts.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
    } else {
      pts.push_back(halton_direction(d, i + 1));
    }
  }
  return pts;
}

std::vector<Point> normal_sequence(int d, std::size_t count) {
  if (d < 2) invalid_input("normal_sequence: dimension must be >= 2");
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (d == 2) {
      const double th = 2.0 * std::numbers::pi * radical_inverse(i, 2);
      out.push_back({std::cos(th), std::sin(th)});
    } else if (d == 3) {
      const double z = 1.0 - 2.0 * radical_inverse(i + 1, 2);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = 2.0 * std::numbers::pi * radical_inverse(i + 1, 3);
      out.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
    } else {
      out.push_back(halton_direction(d, i + 1));
    }
  }
  return out;
}

EpsilonResult epsilon_n(const DomainPair& dp, std::span<const double> x, double r, std::size_t normals,
                        std::size_t sphere_samples) {
  if (!(r > 0.0) || !std::isfinite(r)) invalid_input("epsilon_n: radius must be positive");
  const int d = dp.ambient;
  if (static_cast<int>(x.size()) != d) invalid_input("epsilon_n: point dimension mismatch");
  if (normals == 0 || sphere_samples == 0) invalid_input("epsilon_n: need normals and samples");

  // unit offsets of the samples and their labels, shared by every normal
  const std::vector<Point> dirs = sphere_points(d, sphere_samples);
  std::vector<Side> labels(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t s) {
    Point p(x.begin(), x.end());
    for (int a = 0; a < d; ++a) p[a] += r * dirs[s][a];
    labels[s] = dp(p);
  });
  const double unit = sphere_area(d) / static_cast<double>(dirs.size());

  auto mismatch = [&](const Point& nu) {
    std::size_t bad = 0;
    for (std::size_t s = 0; s < dirs.size(); ++s) {
      const double side = dot(dirs[s], nu);
      if (side > 0.0 ? labels[s] != Side::kPlus : side < 0.0 && labels[s] != Side::kMinus) ++bad;
    }
    return bad;
  };
  // best of a candidate list; ties keep the earliest
  auto best_of = [&](const std::vector<Point>& cands, std::size_t& best_bad) {
    std::vector<std::size_t> bad(cands.size());
    parallel_for(cands.size(), [&](std::size_t i) { bad[i] = mismatch(cands[i]); });
    std::size_t arg = 0;
    for (std::size_t i = 1; i < cands.size(); ++i) {
      if (bad[i] < bad[arg]) arg = i;
    }
    best_bad = bad[arg];
    return cands[arg];
  };

  EpsilonResult res;
  res.samples = dirs.size();
  res.normals = normals;
  std::size_t best_bad = 0;
  Point best = best_of(normal_sequence(d, normals), best_bad);
  res.coarse = unit * static_cast<double>(best_bad);

  double step = d == 2 ? 2.0 * std::numbers::pi / static_cast<double>(normals)
                       : std::pow(sphere_area(d) / static_cast<double>(normals), 1.0 / (d - 1));
  // the grid spans +-reach steps, so the next round's step can shrink by reach
  const int reach = d <= 3 ? 8 : 3;
  // stop once a round has searched below the sample spacing
  const double spacing = std::pow(unit, 1.0 / (d - 1));
  for (int round = 0; round < kMaxRefineRounds; ++round) {
    const std::vector<Point> tb = tangent_basis(best);
    std::vector<Point> cands{best};
    const int m = static_cast<int>(tb.size());
    if (m <= 4) {
      std::vector<int> c(static_cast<std::size_t>(m), -reach);
      while (true) {
        Point v = best;
        for (int i = 0; i < m; ++i) {
          for (int a = 0; a < d; ++a) v[a] += step * c[i] * tb[i][a];
        }
        normalize(v);
        cands.push_back(std::move(v));
        int i = 0;
        while (i < m && ++c[i] > reach) c[i++] = -reach;
        if (i == m) break;
      }
    } else {
      for (int i = 0; i < m; ++i) {
        for (int c = -reach; c <= reach; ++c) {
          if (c == 0) continue;
          Point v = best;
          for (int a = 0; a < d; ++a) v[a] += step * c * tb[i][a];
          normalize(v);
          cands.push_back(std::move(v));
        }
      }
    }
    best = best_of(cands, best_bad);
    res.stages.push_back(unit * static_cast<double>(best_bad));
    if (step <= spacing) break;
    step /= reach;
  }
  res.value = res.stages.back();
  res.normal = best;
  return res;
}

EpsilonProfile epsilon_square_function(const DomainPair& dp, std::span<const double> x, int j_min, int j_max,
                                       std::size_t normals, std::size_t sphere_samples) {
  if (j_min > j_max) invalid_input("epsilon_square_function: bad scale range");
  EpsilonProfile p;
  p.center.assign(x.begin(), x.end());
  for (int j = j_min; j <= j_max; ++j) {
    const double e = epsilon_n(dp, x, std::ldexp(1.0, -j), normals, sphere_samples).value;
    p.levels.push_back(j);
    p.values.push_back(e);
    p.square_function += e * e * std::numbers::ln2;
  }
  return p;
}

}  // namespace gmt
