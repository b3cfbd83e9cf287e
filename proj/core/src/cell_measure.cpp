#include "gmt/cell_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "gmt/error.hpp"

namespace gmt {

namespace {

struct Builder {
  CellTreeBuilder b;
  const std::vector<std::vector<unsigned char>>& paths;
  const std::vector<std::size_t>& order;
  const std::vector<double>& masses;

  // returns (node, mass); node kNoNode if the range has zero mass
  std::pair<NodeId, double> build(std::size_t first, std::size_t last, int level) {
    if (level == b.depth()) {
      double m = 0.0;
      for (std::size_t i = first; i < last; ++i) m += masses[order[i]];
      if (!(m > 0.0)) return {kNoNode, 0.0};
      return {b.leaf(m), m};
    }
    std::vector<NodeId> kids(b.fanout(), kNoNode);
    double total = 0.0;
    std::size_t i = first;
    while (i < last) {
      const unsigned slot = paths[order[i]][level];
      std::size_t j = i;
      while (j < last && paths[order[j]][level] == slot) ++j;
      auto [node, m] = build(i, j, level + 1);
      kids[slot] = node;
      total += m;
      i = j;
    }
    if (!(total > 0.0)) return {kNoNode, 0.0};
    return {b.node(level, total, kids), total};
  }
};

}  // namespace

double tree_sum_defect(const CellTree& tree) {
  double worst = 0.0;
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    if (tree.is_leaf(id)) continue;
    double sum = 0.0;
    for (NodeId c : tree.children(id)) {
      if (c != kNoNode) sum += tree.weight(c);
    }
    const double w = tree.weight(id);
    const double scale = std::max(std::abs(w), std::abs(sum));
    if (scale > 0.0) worst = std::max(worst, std::abs(w - sum) / scale);
  }
  return worst;
}

CellMeasure::CellMeasure(int dim, int depth) : tree_(CellTreeBuilder(dim, depth).build(kNoNode)) {}

CellMeasure CellMeasure::from_masses(int dim, int depth, std::span<const std::pair<CubeIndex, double>> masses) {
  std::vector<std::vector<unsigned char>> paths;
  std::vector<double> values;
  for (const auto& [idx, m] : masses) {
    if (!std::isfinite(m) || m < 0.0) invalid_input("measure masses must be finite and nonnegative");
    const DyadicCube cell(dim, depth, idx);
    if (m == 0.0) continue;
    std::vector<unsigned char> p(static_cast<std::size_t>(depth));
    for (int l = 0; l < depth; ++l) p[l] = static_cast<unsigned char>(child_slot(cell.index(), depth, l));
    paths.push_back(std::move(p));
    values.push_back(m);
  }
  std::vector<std::size_t> order(paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return paths[a] < paths[b]; });
  Builder builder{CellTreeBuilder(dim, depth), paths, order, values};
  if (order.empty()) return CellMeasure(std::move(builder.b).build(kNoNode));
  const auto [root, total] = builder.build(0, order.size(), 0);
  (void)total;
  return CellMeasure(std::move(builder.b).build(root));
}

CellMeasure CellMeasure::from_tree(CellTree tree) {
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    if (!(tree.weight(id) > 0.0) || !std::isfinite(tree.weight(id))) {
      invalid_input("measure tree nodes must carry positive finite mass");
    }
  }
  if (tree_sum_defect(tree) > 1e-12) invalid_input("measure tree masses are not additive");
  return CellMeasure(std::move(tree));
}

CellMeasure CellMeasure::uniform(const CellSet& set) {
  const CellTree& t = set.tree();
  CellTreeBuilder b(set.dim(), set.depth());
  if (set.empty()) return CellMeasure(std::move(b).build(kNoNode));
  const auto counts = t.leaf_counts();
  const double total = counts[t.root()];
  std::vector<NodeId> map(t.node_count(), kNoNode);
  for (NodeId id = 0; id < t.node_count(); ++id) {
    const double m = counts[id] / total;
    if (t.is_leaf(id)) {
      map[id] = b.leaf(m);
      continue;
    }
    std::vector<NodeId> kids(b.fanout(), kNoNode);
    for (unsigned s = 0; s < b.fanout(); ++s) {
      const NodeId c = t.child(id, s);
      if (c != kNoNode) kids[s] = map[c];
    }
    map[id] = b.node(t.level(id), m, kids);
  }
  return CellMeasure(std::move(b).build(map[t.root()]));
}

double CellMeasure::cube_mass(const DyadicCube& cube) const {
  if (cube.dim() != dim()) invalid_input("cube_mass: dimension mismatch");
  if (cube.level() > depth()) invalid_input("cube_mass: cube deeper than measure depth");
  const NodeId id = tree_.find(cube);
  return id == kNoNode ? 0.0 : tree_.weight(id);
}

CellSet CellMeasure::support() const {
  CellTreeBuilder b(dim(), depth());
  if (zero()) return CellSet::from_tree(std::move(b).build(kNoNode));
  std::vector<NodeId> map(tree_.node_count(), kNoNode);
  for (NodeId id = 0; id < tree_.node_count(); ++id) {
    if (tree_.is_leaf(id)) {
      map[id] = b.leaf(0.0);
      continue;
    }
    std::vector<NodeId> kids(b.fanout(), kNoNode);
    for (unsigned s = 0; s < b.fanout(); ++s) {
      const NodeId c = tree_.child(id, s);
      if (c != kNoNode) kids[s] = map[c];
    }
    map[id] = b.node(tree_.level(id), 0.0, kids);
  }
  return CellSet::from_tree(std::move(b).build(map[tree_.root()]));
}

CellMeasure CellMeasure::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) invalid_input("measure scale factor must be finite and >= 0");
  CellTreeBuilder b(dim(), depth());
  if (zero() || c == 0.0) return CellMeasure(std::move(b).build(kNoNode));
  std::vector<NodeId> map(tree_.node_count(), kNoNode);
  for (NodeId id = 0; id < tree_.node_count(); ++id) {
    const double m = tree_.weight(id) * c;
    if (tree_.is_leaf(id)) {
      map[id] = b.leaf(m);
      continue;
    }
    std::vector<NodeId> kids(b.fanout(), kNoNode);
    for (unsigned s = 0; s < b.fanout(); ++s) {
      const NodeId ch = tree_.child(id, s);
      if (ch != kNoNode) kids[s] = map[ch];
    }
    map[id] = b.node(tree_.level(id), m, kids);
  }
  return CellMeasure(std::move(b).build(map[tree_.root()]));
}

void CellMeasure::for_each_cell(const std::function<void(const DyadicCube&, double)>& fn, double budget) const {
  if (zero()) return;
  if (tree_.leaf_counts()[tree_.root()] > budget) {
    budget_exhausted("measure enumeration exceeds budget of " + std::to_string(budget) + " cells");
  }
  std::function<void(NodeId, const DyadicCube&)> visit = [&](NodeId id, const DyadicCube& cube) {
    if (tree_.is_leaf(id)) {
      fn(cube, tree_.weight(id));
      return;
    }
    for (unsigned s = 0; s < tree_.fanout(); ++s) {
      const NodeId c = tree_.child(id, s);
      if (c != kNoNode) visit(c, cube.child(s));
    }
  };
  visit(tree_.root(), DyadicCube::root(dim()));
}

std::vector<std::pair<CubeIndex, double>> CellMeasure::entries(double budget) const {
  std::vector<std::pair<CubeIndex, double>> out;
  for_each_cell([&](const DyadicCube& c, double m) { out.emplace_back(c.index(), m); }, budget);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

void Moments::merge(const Moments& other) {
  if (other.mass <= 0.0) return;
  if (mass <= 0.0) {
    *this = other;
    return;
  }
  const std::size_t n = centroid.size();
  const double total = mass + other.mass;
  const double w = mass * other.mass / total;
  std::vector<double> delta(n);
  for (std::size_t i = 0; i < n; ++i) delta[i] = other.centroid[i] - centroid[i];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      scatter[i * n + j] += other.scatter[i * n + j] + w * delta[i] * delta[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) centroid[i] += delta[i] * (other.mass / total);
  mass = total;
}

int ball_cut_level(double r, int depth, int refine_levels) {
  int base = 0;
  if (r < 1.0) base = static_cast<int>(std::ceil(-std::log2(r)));
  return std::clamp(base + refine_levels, 0, depth);
}

MeasureIndex::MeasureIndex(const CellMeasure& measure) : measure_(&measure), dim_(measure.dim()) {
  const CellTree& t = measure.tree();
  const std::size_t n = static_cast<std::size_t>(dim_);
  const std::size_t count = t.node_count();
  mass_.assign(count, 0.0);
  centroid_.assign(count * n, 0.0);
  scatter_.assign(count * n * n, 0.0);
  for (NodeId id = 0; id < count; ++id) {
    if (t.is_leaf(id)) {
      mass_[id] = t.weight(id);
      for (std::size_t i = 0; i < n; ++i) centroid_[id * n + i] = 0.5;
      continue;
    }
    Moments acc(dim_);
    for (unsigned s = 0; s < t.fanout(); ++s) {
      const NodeId c = t.child(id, s);
      if (c == kNoNode) continue;
      Moments part(dim_);
      part.mass = mass_[c];
      for (std::size_t i = 0; i < n; ++i) part.centroid[i] = (((s >> i) & 1u) + centroid_[c * n + i]) * 0.5;
      for (std::size_t k = 0; k < n * n; ++k) part.scatter[k] = scatter_[c * n * n + k] * 0.25;
      acc.merge(part);
    }
    mass_[id] = acc.mass;
    std::copy(acc.centroid.begin(), acc.centroid.end(), centroid_.begin() + static_cast<std::ptrdiff_t>(id * n));
    std::copy(acc.scatter.begin(), acc.scatter.end(), scatter_.begin() + static_cast<std::ptrdiff_t>(id * n * n));
  }
}

Moments MeasureIndex::global(NodeId id, const DyadicCube& cube) const {
  const std::size_t n = static_cast<std::size_t>(dim_);
  Moments m(dim_);
  m.mass = mass_[id];
  const double side = cube.side();
  for (std::size_t i = 0; i < n; ++i) {
    m.centroid[i] = (static_cast<double>(cube.index()[i]) + centroid_[id * n + i]) * side;
  }
  const double s2 = side * side;
  for (std::size_t k = 0; k < n * n; ++k) m.scatter[k] = scatter_[id * n * n + k] * s2;
  return m;
}

Moments MeasureIndex::ball(std::span<const double> x, double r, int refine_levels) const {
  Moments acc(dim_);
  const CellTree& t = measure_->tree();
  if (t.empty()) return acc;
  if (static_cast<int>(x.size()) != dim_) invalid_input("ball query: point dimension mismatch");
  const double reach = r * (1.0 + 1e-12);
  const int cut = ball_cut_level(r, t.depth(), refine_levels);
  std::function<void(NodeId, const DyadicCube&)> visit = [&](NodeId id, const DyadicCube& cube) {
    const Point lo = cube.lower_corner();
    const double side = cube.side();
    if (box_distance(x, lo, side) > reach) return;
    double far = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = std::max(std::abs(x[i] - lo[i]), std::abs(lo[i] + side - x[i]));
      far += d * d;
    }
    if (std::sqrt(far) <= reach) {
      acc.merge(global(id, cube));
      return;
    }
    if (t.is_leaf(id) || cube.level() >= cut) {
      const Moments g = global(id, cube);
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d2 += (g.centroid[i] - x[i]) * (g.centroid[i] - x[i]);
      if (std::sqrt(d2) <= reach) acc.merge(g);
      return;
    }
    for (unsigned s = 0; s < t.fanout(); ++s) {
      const NodeId c = t.child(id, s);
      if (c != kNoNode) visit(c, cube.child(s));
    }
  };
  visit(t.root(), DyadicCube::root(dim_));
  return acc;
}

}  // namespace gmt
