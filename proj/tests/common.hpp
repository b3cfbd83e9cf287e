#pragma once

#include <cstdint>
#include <vector>

#include "gmt/cell_set.hpp"
#include "gmt/lattice.hpp"
#include "gmt/random.hpp"

namespace testing {

// Random subset of the depth-m cells of [0,1)^n, never empty.
inline gmt::CellSet random_cells(int n, int depth, double p, gmt::Rng& rng) {
  std::vector<gmt::CubeIndex> cells;
  const std::int64_t side = std::int64_t{1} << depth;
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= side;
  for (std::int64_t c = 0; c < total; ++c) {
    if (!rng.bernoulli(p)) continue;
    gmt::CubeIndex idx(static_cast<std::size_t>(n));
    std::int64_t r = c;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = r % side;
      r /= side;
    }
    cells.push_back(idx);
  }
  if (cells.empty()) cells.push_back(gmt::CubeIndex(static_cast<std::size_t>(n), 0));
  return gmt::CellSet::from_cells(n, depth, cells);
}

inline gmt::CellSet single_cell(int n, int depth, const gmt::CubeIndex& idx) {
  return gmt::CellSet::from_cells(n, depth, std::vector<gmt::CubeIndex>{idx});
}

}  // namespace testing
