#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmt/cell_measure.hpp"
#include "gmt/cell_set.hpp"
#include "gmt/cell_tree.hpp"
#include "gmt/gauge.hpp"
#include "gmt/lattice.hpp"

namespace gmt {

/// Witness that a set is ell-sparse: at each scale l_j every level-l_j cube
/// owns at most one selected level-(l_j + ell) subcube.
///
/// Family j is a tree of depth l_j whose leaves are the cubes Q that own a
/// selection; a leaf's weight encodes the offset of Q' inside Q as
/// sum_i o_i 2^(ell i).
class SparsityCertificate {
 public:
  SparsityCertificate(int dim, int ell);

  int dim() const noexcept { return dim_; }
  int ell() const noexcept { return ell_; }
  std::size_t scale_count() const noexcept { return scales_.size(); }
  const std::vector<int>& scales() const noexcept { return scales_; }
  int scale(std::size_t j) const { return scales_.at(j); }
  const CellTree& family(std::size_t j) const { return families_.at(j); }

  /// Appends a scale; `family` must have depth `level` and dimension dim().
  /// Scales must satisfy level >= previous + ell.
  void add_scale(int level, CellTree family);

  /// Appends a scale from explicit (Q, Q') pairs; rejects Q' not inside Q and
  /// two different selections in one Q.
  void add_scale(int level, std::span<const std::pair<CubeIndex, CubeIndex>> pairs);

  /// Selected subcube of the level-l_j cube q, if any.
  std::optional<DyadicCube> selected(std::size_t j, const DyadicCube& q) const;

  /// Number of selections at scale j.
  double selection_count(std::size_t j) const;

  /// (Q, Q') pairs at scale j, sorted by Q.
  std::vector<std::pair<CubeIndex, CubeIndex>> pairs(std::size_t j, double budget = 1 << 24) const;

  CubeIndex decode_offset(double code) const;
  double encode_offset(std::span<const std::int64_t> offset) const;

 private:
  int dim_;
  int ell_;
  std::vector<int> scales_;
  std::vector<CellTree> families_;
};

enum class AlphaMode { kExactDiagonal, kBallBound };

/// Smallest ell with 3^n 2^(-ell k) alpha < omega_k 2^-k, where alpha bounds
/// the largest k-dimensional slice of the unit cube: sqrt(n) for k = 1
/// (kExactDiagonal), omega_k (sqrt(n)/2)^k in general (kBallBound).
int min_sparsity_parameter(int n, int k, AlphaMode mode);

struct SparseOptions {
  bool keep_history = false;  // record nu_0 .. nu_J
};

struct SparseResult {
  CellMeasure measure{1, 0};            // final nu
  SparsityCertificate certificate{1, 1};
  double input_total = 0.0;             // mass of mu before normalization
  bool normalized = false;              // mu was rescaled to a probability measure
  double mass_factor = 1.0;             // max(1, 1 / input_total)
  double gauge_constant = 1.0;          // max(1, sup h(d)/d^k) over cube diameters
  double rescale_constant = 1.0;        // C0: nu(Q) <= C0 (diam Q)^k for all Q
  std::vector<CellMeasure> history;     // nu_0 .. nu_J when requested
};

/// Iterated selection: at each scale l_j (the first level >= l_{j-1} + ell
/// from which h(d)/d^k <= 2^(-n j ell) holds down to the leaves) every
/// level-l_j cube Q of positive mass keeps only its heaviest level-(l_j+ell)
/// subcube Q' (ties: lexicographically smallest offset), reweighted by
/// nu(Q)/nu(Q'). Stops when l_j + ell exceeds the depth.
///
/// Throws kInvalidInput if h(d)/d^k does not decrease along the grid, and
/// kDepthBudget (message carries the required depth) if no scale fits.
SparseResult build_sparse_measure(const CellMeasure& mu, const Gauge& h, int k, int ell, SparseOptions options = {});

struct SparseCapReport {
  double max_ratio_gauge = 0.0;    // max nu(Q) / (mass_factor 2^(J n ell) h(diam Q))
  double max_ratio_rescaled = 0.0; // max nu(Q) / (C0 (diam Q)^k)
  std::optional<DyadicCube> worst_cube;
  bool pass = false;
};

/// Exhaustive cap check over all cubes meeting the support of result.measure.
SparseCapReport check_sparse_caps(const SparseResult& result, const Gauge& h, int k);

/// Max relative difference of nu_next(Q) and nu_prev(Q) over cubes of level
/// <= level meeting either support.
double max_coarse_mass_deviation(const CellMeasure& next, const CellMeasure& prev, int level);

/// True iff every cell of E lies, at every scale, inside the selected subcube
/// of its level-l_j ancestor. Throws kInvalidInput if a scale plus ell is
/// deeper than E.
bool check_sparse(const CellSet& set, const SparsityCertificate& cert);

}  // namespace gmt
