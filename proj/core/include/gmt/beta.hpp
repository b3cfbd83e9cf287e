#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gmt/cell_measure.hpp"
#include "gmt/cell_set.hpp"
#include "gmt/holes.hpp"
#include "gmt/lattice.hpp"

namespace gmt {

/// Weighted point masses in R^n; coordinates are unrestricted.
struct PointCloud {
  int dim = 0;
  std::vector<Point> points;
  std::vector<double> weights;

  /// Moments of the points in the closed ball B(x, r) (tolerance 1e-12 r).
  Moments ball(std::span<const double> x, double r) const;
};

/// N equally weighted points (total 2 pi radius) on a circle in the plane.
PointCloud circle_cloud(std::size_t count, std::span<const double> center, double radius);

struct AffineFit {
  AffinePlane plane;       // through the barycenter, top-k eigenvectors
  double residual = 0.0;   // min over k-planes of the integral of dist^2
  double mass = 0.0;
  bool empty = true;       // no mass in the ball: residual 0, plane = x
};

AffineFit best_affine_fit(const Moments& m, int k, std::span<const double> fallback_base);
AffineFit best_affine_fit(const MeasureIndex& mu, std::span<const double> x, double r, int k);
AffineFit best_affine_fit(const PointCloud& mu, std::span<const double> x, double r, int k);

/// Integral of dist(y, L)^2 for the mass summarized by m.
double plane_residual(const Moments& m, const AffinePlane& plane);

/// (r^(-k-2) * residual)^(1/2); zero on an empty ball.
double beta2(const MeasureIndex& mu, std::span<const double> x, double r, int k);
double beta2(const PointCloud& mu, std::span<const double> x, double r, int k);

struct BetaProfile {
  Point center;
  std::vector<int> levels;      // j
  std::vector<double> betas;    // beta(x, 2^-j)
  double square_function = 0.0; // sum_j beta^2 ln 2
};

/// Sum of beta^2 ln 2 in the given order.
double dyadic_square_sum(std::span<const double> betas);

BetaProfile square_function(const MeasureIndex& mu, std::span<const double> x, int k, int j_min, int j_max);
BetaProfile square_function(const PointCloud& mu, std::span<const double> x, int k, int j_min, int j_max);

struct ContentBetaResult {
  double value = 0.0;
  AffinePlane plane;
  std::size_t cells = 0;       // cells of E in the ball at the working resolution
  std::size_t evaluations = 0; // planes evaluated
};

/// Layer-cake value r^(-k-2) * integral of H^k_inf({y in B_r(x) cap E : dist(y,L) > t}) 2t dt
/// for one plane, over a geometric t grid of t_grid points in [r 2^-t_grid, r]
/// extended up to 2r when needed.
double content_beta_for_plane(std::span<const CubeIndex> cells, int dim, int level, const AffinePlane& plane,
                              double r, int k, int t_grid);

/// Infimum of the layer-cake value over k-planes, approximated by a plane
/// grid (plane_grid angles for n = 2, k = 1; plane_grid random frames
/// otherwise) followed by golden-section refinement of offset and, in the
/// plane, of the angle. E is read at level ceil(log2(1/r)) + resolution,
/// capped at its depth.
ContentBetaResult content_beta(const CellSet& set, std::span<const double> x, double r, int k, int plane_grid = 90,
                               int t_grid = 24, std::uint64_t seed = 0, int resolution = 6);

}  // namespace gmt
