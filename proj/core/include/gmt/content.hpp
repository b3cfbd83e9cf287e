#pragma once

#include <span>
#include <vector>

#include "gmt/cell_set.hpp"
#include "gmt/gauge.hpp"
#include "gmt/lattice.hpp"

namespace gmt {

/// Optimal dyadic cover of a cell set.
struct CoverSolution {
  double cost = 0.0;
  std::vector<DyadicCube> cover;  // disjoint, sorted by (level, index)
  int min_level = 0;              // covers use cubes of level >= min_level
};

/// Infimum of sum h(diam Q) over covers of E by dyadic cubes of level >=
/// min_level, i.e. H^h_delta restricted to dyadic covers with
/// delta = sqrt(n) 2^-min_level. Exact tree DP
///   cost(Q) = min(h(diam Q), sum over occupied children cost(child)),
/// leaves cost h(diam). Ties keep the shallower cube. Throws kDepthBudget if
/// the optimal cover has more than `cover_budget` cubes.
CoverSolution dyadic_cover_cost(const CellSet& set, const Gauge& h, int min_level, double cover_budget = 1 << 22);

/// Cost only; never materializes the cover.
double dyadic_cover_value(const CellSet& set, const Gauge& h, int min_level);

/// H^h_infinity over dyadic covers.
double content(const CellSet& set, const Gauge& h);

/// dyadic_cover_value for min_level = 0 .. depth; nondecreasing.
std::vector<double> measure_profile(const CellSet& set, const Gauge& h);

/// Same DP over an explicit list of depth-`depth` cell indices (duplicates
/// allowed). Used by the content beta coefficient, which evaluates many
/// small superlevel sets. Requires dim * depth <= 63.
double cover_value_of_cells(int dim, int depth, std::span<const CubeIndex> cells, const Gauge& h, int min_level = 0);

}  // namespace gmt
