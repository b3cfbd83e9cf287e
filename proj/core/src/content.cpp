#include "gmt/content.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>

#include "gmt/error.hpp"

namespace gmt {

namespace {

struct CoverDp {
  std::vector<double> cost;
  std::vector<char> take;  // 1: cover by this cube
};

CoverDp run_dp(const CellTree& t, const Gauge& h, int min_level) {
  CoverDp dp;
  dp.cost.assign(t.node_count(), 0.0);
  dp.take.assign(t.node_count(), 0);
  const int dim = t.dim();
  // ids are topological: children precede parents
  for (NodeId id = 0; id < t.node_count(); ++id) {
    const int level = t.level(id);
    const double here = h(cube_diameter(dim, level));
    if (t.is_leaf(id)) {
      dp.cost[id] = here;
      dp.take[id] = 1;
      continue;
    }
    double below = 0.0;
    for (NodeId c : t.children(id)) {
      if (c != kNoNode) below += dp.cost[c];
    }
    if (level >= min_level && here <= below) {
      dp.cost[id] = here;
      dp.take[id] = 1;
    } else {
      dp.cost[id] = below;
    }
  }
  return dp;
}

}  // namespace

CoverSolution dyadic_cover_cost(const CellSet& set, const Gauge& h, int min_level, double cover_budget) {
  if (min_level < 0) invalid_input("min_level must be >= 0");
  if (min_level > set.depth()) invalid_input("min_level exceeds set depth");
  CoverSolution sol;
  sol.min_level = min_level;
  if (set.empty()) return sol;
  const CellTree& t = set.tree();
  const CoverDp dp = run_dp(t, h, min_level);
  sol.cost = dp.cost[t.root()];

  // count cover size before materializing it
  std::vector<double> pieces(t.node_count(), 0.0);
  for (NodeId id = 0; id < t.node_count(); ++id) {
    if (dp.take[id]) {
      pieces[id] = 1.0;
      continue;
    }
    for (NodeId c : t.children(id)) {
      if (c != kNoNode) pieces[id] += pieces[c];
    }
  }
  if (pieces[t.root()] > cover_budget) {
    budget_exhausted("optimal cover has " + std::to_string(pieces[t.root()]) + " cubes, over budget");
  }
  std::function<void(NodeId, const DyadicCube&)> collect = [&](NodeId id, const DyadicCube& cube) {
    if (dp.take[id]) {
      sol.cover.push_back(cube);
      return;
    }
    for (unsigned s = 0; s < t.fanout(); ++s) {
      const NodeId c = t.child(id, s);
      if (c != kNoNode) collect(c, cube.child(s));
    }
  };
  collect(t.root(), DyadicCube::root(set.dim()));
  std::sort(sol.cover.begin(), sol.cover.end(), [](const DyadicCube& a, const DyadicCube& b) {
    return a.level() != b.level() ? a.level() < b.level() : a.index() < b.index();
  });
  return sol;
}

double dyadic_cover_value(const CellSet& set, const Gauge& h, int min_level) {
  if (min_level < 0) invalid_input("min_level must be >= 0");
  if (min_level > set.depth()) invalid_input("min_level exceeds set depth");
  if (set.empty()) return 0.0;
  return run_dp(set.tree(), h, min_level).cost[set.tree().root()];
}

double content(const CellSet& set, const Gauge& h) { return dyadic_cover_value(set, h, 0); }

std::vector<double> measure_profile(const CellSet& set, const Gauge& h) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(set.depth()) + 1);
  for (int l = 0; l <= set.depth(); ++l) out.push_back(dyadic_cover_value(set, h, l));
  return out;
}

double cover_value_of_cells(int dim, int depth, std::span<const CubeIndex> cells, const Gauge& h, int min_level) {
  if (static_cast<long long>(dim) * depth > 63) invalid_input("cover_value_of_cells: dim * depth exceeds 63 bits");
  if (cells.empty()) return 0.0;
  // Morton keys, coarse bits first, so siblings are contiguous at every level
  std::vector<std::uint64_t> keys;
  keys.reserve(cells.size());
  for (const auto& idx : cells) {
    std::uint64_t key = 0;
    for (int l = 0; l < depth; ++l) {
      for (int i = 0; i < dim; ++i) {
        key = (key << 1) | static_cast<std::uint64_t>((idx[i] >> (depth - 1 - l)) & 1);
      }
    }
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<double> cost(keys.size(), h(cube_diameter(dim, depth)));
  for (int level = depth - 1; level >= 0; --level) {
    const double here = h(cube_diameter(dim, level));
    std::size_t out = 0;
    std::size_t i = 0;
    while (i < keys.size()) {
      const std::uint64_t parent = keys[i] >> dim;
      double below = 0.0;
      std::size_t j = i;
      while (j < keys.size() && (keys[j] >> dim) == parent) below += cost[j++];
      keys[out] = parent;
      cost[out] = (level >= min_level && here <= below) ? here : below;
      ++out;
      i = j;
    }
    keys.resize(out);
    cost.resize(out);
  }
  return cost[0];
}

}  // namespace gmt
