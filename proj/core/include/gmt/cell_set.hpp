#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gmt/cell_tree.hpp"
#include "gmt/lattice.hpp"
#include "gmt/random.hpp"

namespace gmt {

/// Finite set of depth-m dyadic cells of [0,1)^n: the discrete stand-in for a
/// compact set E. Stored as a shared-structure tree, so membership and
/// equality never depend on insertion order.
class CellSet {
 public:
  /// Empty set.
  CellSet(int dim, int depth);

  static CellSet from_cells(int dim, int depth, std::span<const CubeIndex> cells);

  /// Wraps a tree whose weights are ignored.
  static CellSet from_tree(CellTree tree);

  /// Every depth-m cell inside `cube` (the full dyadic block).
  static CellSet full_cube(int dim, int depth, const DyadicCube& cube);

  int dim() const noexcept { return dim_; }
  int depth() const noexcept { return depth_; }
  bool empty() const noexcept { return tree_.empty(); }
  const CellTree& tree() const noexcept { return tree_; }

  /// Number of cells (floating point: can exceed 2^64 at large depth).
  double size() const;

  bool contains(const DyadicCube& cell) const;

  /// True if some cell lies inside `cube` (cube.level() <= depth).
  bool meets(const DyadicCube& cube) const;

  /// Visits every cell in DFS slot order. Throws kDepthBudget when the set
  /// has more than `budget` cells.
  void for_each_cell(const std::function<void(const DyadicCube&)>& fn, double budget = 1 << 24) const;

  /// Cells sorted lexicographically by index.
  std::vector<CubeIndex> cells(double budget = 1 << 24) const;

  /// Same set discretized at `level` <= depth: a level-`level` cell is kept
  /// when it contains at least one original cell.
  CellSet coarsened(int level) const;

  /// Same set at a finer depth: each cell replaced by all its descendants.
  CellSet refined(int depth) const;

  CellSet united(const CellSet& other) const;
  bool is_subset_of(const CellSet& other) const;

  /// Uniformly random cell (each cell equally likely).
  std::optional<DyadicCube> sample_cell(Rng& rng) const;

  bool operator==(const CellSet& other) const;

 private:
  CellSet(int dim, int depth, CellTree tree) : dim_(dim), depth_(depth), tree_(std::move(tree)) {}

  int dim_;
  int depth_;
  CellTree tree_;
};

/// Canonical slot of the child of a level-`level` cube that contains cell
/// `index` given at `depth`.
unsigned child_slot(std::span<const std::int64_t> index, int depth, int level);

}  // namespace gmt
