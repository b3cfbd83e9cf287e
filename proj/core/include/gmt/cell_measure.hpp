#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gmt/cell_set.hpp"
#include "gmt/cell_tree.hpp"
#include "gmt/lattice.hpp"

namespace gmt {

/// Nonnegative masses on the depth-m cells of [0,1)^n. Every stored node
/// carries the mass of its cube; cubes of zero mass are absent, so the tree
/// shape is exactly the support.
class CellMeasure {
 public:
  /// Zero measure.
  CellMeasure(int dim, int depth);

  /// Cells with nonpositive mass are dropped; duplicates accumulate.
  static CellMeasure from_masses(int dim, int depth, std::span<const std::pair<CubeIndex, double>> masses);

  /// Wraps a tree whose node weights are cube masses. Throws if a weight is
  /// negative or a node's weight disagrees with its children's sum beyond
  /// 1e-12 relative.
  static CellMeasure from_tree(CellTree tree);

  /// Each cell of E gets mass 1 / #E.
  static CellMeasure uniform(const CellSet& set);

  int dim() const noexcept { return tree_.dim(); }
  int depth() const noexcept { return tree_.depth(); }
  bool zero() const noexcept { return tree_.empty(); }
  double total() const { return zero() ? 0.0 : tree_.weight(tree_.root()); }
  const CellTree& tree() const noexcept { return tree_; }

  /// Mass of the cube; cube.level() must not exceed depth().
  double cube_mass(const DyadicCube& cube) const;

  CellSet support() const;

  /// c * mu for c >= 0 (c = 0 yields the zero measure).
  CellMeasure scaled(double c) const;

  /// Visits every (cell, mass) in DFS slot order; throws kDepthBudget when
  /// the support exceeds `budget` cells.
  void for_each_cell(const std::function<void(const DyadicCube&, double)>& fn, double budget = 1 << 24) const;

  /// (cell, mass) pairs sorted lexicographically by index.
  std::vector<std::pair<CubeIndex, double>> entries(double budget = 1 << 24) const;

 private:
  explicit CellMeasure(CellTree tree) : tree_(std::move(tree)) {}
  CellTree tree_;
};

/// Mass centroid and second central moments of a measure restricted to a
/// region, in global coordinates. `scatter` is row-major n x n.
struct Moments {
  double mass = 0.0;
  std::vector<double> centroid;
  std::vector<double> scatter;

  explicit Moments(int dim = 0)
      : centroid(static_cast<std::size_t>(dim), 0.0), scatter(static_cast<std::size_t>(dim) * dim, 0.0) {}

  /// Pairwise (parallel-axis) merge; exact when centroids coincide along an axis.
  void merge(const Moments& other);
};

/// Per-node moments of a CellMeasure in each cube's local frame, computed
/// once so ball queries can take whole cubes. Cells act as point masses at
/// their centers.
class MeasureIndex {
 public:
  explicit MeasureIndex(const CellMeasure& measure);
  // holds a pointer to the measure, so temporaries are rejected
  explicit MeasureIndex(CellMeasure&&) = delete;

  const CellMeasure& measure() const noexcept { return *measure_; }

  /// Moments of the cells whose centers lie in the closed ball B(x, r).
  /// Cubes straddling the sphere are split down to level
  /// ceil(log2(1/r)) + refine_levels; below that a straddling cube counts
  /// entirely iff its centroid lies in the ball.
  Moments ball(std::span<const double> x, double r, int refine_levels = 12) const;

  double ball_mass(std::span<const double> x, double r, int refine_levels = 12) const {
    return ball(x, r, refine_levels).mass;
  }

 private:
  Moments global(NodeId id, const DyadicCube& cube) const;

  const CellMeasure* measure_;
  int dim_;
  std::vector<double> mass_;
  std::vector<double> centroid_;  // local units: [0,1]^n per cube
  std::vector<double> scatter_;   // local units: divided by side^2
};

/// Resolution level used by ball queries at radius r.
int ball_cut_level(double r, int depth, int refine_levels);

/// Maximal relative disagreement between node weights and children sums.
double tree_sum_defect(const CellTree& tree);

}  // namespace gmt
