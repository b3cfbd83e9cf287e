#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gmt/cell_measure.hpp"
#include "gmt/cell_set.hpp"
#include "gmt/gauge.hpp"
#include "gmt/lattice.hpp"

namespace gmt {

struct FrostmanReport {
  std::string gauge_label;
  double total_mass = 0.0;
  double max_ratio = 0.0;                 // max over cubes meeting the support of mu(Q) / h(diam Q)
  std::optional<DyadicCube> worst_cube;   // first cube (DFS order) attaining max_ratio
  double saturated_cover_cost = 0.0;      // sum of h(diam Q) over maximal saturated cubes
  double cubes_checked = 0.0;             // number of distinct cubes covered by the check
  bool pass = false;                      // max_ratio <= 1 + 1e-9
  std::string note;
};

/// mu(Q) for a cube of level <= depth.
inline double cube_mass(const CellMeasure& mu, const DyadicCube& cube) { return mu.cube_mass(cube); }

/// Discrete Frostman construction: each cell of E starts saturated with mass
/// h(diam), then levels m-1 .. 0 are swept upward, scaling the contents of any
/// cube whose mass exceeds h(diam Q) down to exactly h(diam Q). Scaling is
/// recorded as per-node factors and flattened in one top-down pass.
/// Throws kInvalidInput for an empty set.
CellMeasure build_frostman(const CellSet& set, const Gauge& h);

/// Exhaustive cap check over every dyadic cube meeting the support.
FrostmanReport verify_frostman(const CellMeasure& mu, const Gauge& h);

struct BallFrostmanReport {
  int k = 1;
  std::size_t samples = 0;
  double constant = 0.0;        // sup mu(B_r(x)) / r^k over sampled (x, r)
  Point worst_center;
  double worst_radius = 0.0;
  double cover_constant = 0.0;  // sup of (sum of mu(Q) over level-j cubes meeting the ball) / r^k
};

/// Monte-Carlo bound for mu(B_r(x)) <= C r^k: centers are uniform points in
/// uniformly sampled support cells, radii r = 2^-j for j = 0..depth.
BallFrostmanReport ball_frostman_check(const CellMeasure& mu, int k, std::size_t samples, std::uint64_t seed = 0);

}  // namespace gmt
