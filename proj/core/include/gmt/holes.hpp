#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gmt/cell_set.hpp"
#include "gmt/lattice.hpp"
#include "gmt/random.hpp"
#include "gmt/sparsify.hpp"

namespace gmt {

/// x + span(frame); the frame rows are orthonormal.
struct AffinePlane {
  Point base;
  std::vector<Point> frame;

  int dim() const noexcept { return static_cast<int>(base.size()); }
  int rank() const noexcept { return static_cast<int>(frame.size()); }
  /// base + sum_i t_i frame_i.
  Point at(std::span<const double> t) const;
};

/// k orthonormal vectors in R^n from Gram-Schmidt on Gaussian samples.
std::vector<Point> random_frame(int n, int k, Rng& rng);

/// Throws kInvalidInput unless the frame is orthonormal to 1e-9.
void validate_plane(const AffinePlane& plane);

/// Closed box [lo, lo + side]^n.
struct Box {
  Point lo;
  double side = 0.0;
};

struct Hole {
  Point y;
  double clearance = std::numeric_limits<double>::infinity();  // dist(y, union of boxes)
};

/// Grid point y of the disc {base + t : |t| <= radius} in the plane that is
/// farthest from every obstacle. `grid` points per axis of the parameter
/// square; a disc-free obstacle list gives infinite clearance at the base.
Hole search_hole(std::span<const Box> obstacles, const AffinePlane& plane, double radius, int grid);

/// Obstacles seen from x at scale j: the selected subcubes of the level-l_j
/// cubes whose index differs from x's by at most 2 per axis.
std::vector<Box> scale_obstacles(const SparsityCertificate& cert, std::size_t j, std::span<const double> x);

/// Best hole of radius 2^(-l_j - 1) around plane.base at scale j; empty
/// unless its clearance reaches c_target 2^(-l_j).
std::optional<Hole> find_hole(const SparsityCertificate& cert, std::size_t j, const AffinePlane& plane,
                              double c_target, int grid = 64);

struct C0Estimate {
  double c0 = 0.0;             // min over trials of the best unit-scale clearance
  std::size_t trials = 0;
  int grid = 0;
  int ell_threshold = 0;       // smallest ell with a provable hole
  bool below_threshold = false;
};

/// Random unit-scale configurations: one random 2^-ell subcube in every unit
/// cube of {-2..2}^n, x uniform in the one at the origin, a random k-plane
/// through x, disc radius 1/2.
C0Estimate estimate_c0(int n, int k, int ell, std::size_t trials, int grid, std::uint64_t seed);

struct WitnessFailure {
  std::size_t sample = 0;
  std::size_t scale = 0;
  Point x;
  double relative_clearance = 0.0;
};

struct WitnessReport {
  bool sparse = false;              // check_sparse(set, cert)
  double c0 = 0.0;
  std::size_t samples = 0;
  std::size_t checks = 0;
  double min_relative_clearance = std::numeric_limits<double>::infinity();
  std::vector<double> per_scale_min;
  std::vector<WitnessFailure> failures;
  bool pass = false;
};

/// Samples x uniformly from the cells of E and a random k-plane through x,
/// and requires a hole of relative clearance >= c0 at every certified scale.
/// A failed sparsity check fails the witness without sampling.
WitnessReport witness_unrectifiability(const CellSet& set, const SparsityCertificate& cert, int k, double c0,
                                       std::size_t samples, int grid = 64, std::uint64_t seed = 0);

}  // namespace gmt
