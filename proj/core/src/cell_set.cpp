#include "gmt/cell_set.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "gmt/error.hpp"

namespace gmt {

unsigned child_slot(std::span<const std::int64_t> index, int depth, int level) {
  unsigned slot = 0;
  const int shift = depth - level - 1;
  for (std::size_t i = 0; i < index.size(); ++i) slot |= static_cast<unsigned>((index[i] >> shift) & 1) << i;
  return slot;
}

namespace {

CellTree empty_tree(int dim, int depth) { return CellTreeBuilder(dim, depth).build(kNoNode); }

// Builds the subtree for cells[first, last) which all lie in one level-`level`
// cube; the range is sorted by root-to-leaf slot path.
NodeId build_range(CellTreeBuilder& b, const std::vector<std::vector<unsigned char>>& paths,
                   const std::vector<std::size_t>& order, std::size_t first, std::size_t last, int level) {
  if (level == b.depth()) return b.leaf(0.0);
  std::vector<NodeId> kids(b.fanout(), kNoNode);
  std::size_t i = first;
  while (i < last) {
    const unsigned slot = paths[order[i]][level];
    std::size_t j = i;
    while (j < last && paths[order[j]][level] == slot) ++j;
    kids[slot] = build_range(b, paths, order, i, j, level + 1);
    i = j;
  }
  return b.node(level, 0.0, kids);
}

}  // namespace

CellSet::CellSet(int dim, int depth) : dim_(dim), depth_(depth), tree_(empty_tree(dim, depth)) {}

CellSet CellSet::from_tree(CellTree tree) {
  const int dim = tree.dim();
  const int depth = tree.depth();
  return CellSet(dim, depth, std::move(tree));
}

CellSet CellSet::from_cells(int dim, int depth, std::span<const CubeIndex> cells) {
  CellTreeBuilder b(dim, depth);
  if (cells.empty()) return CellSet(dim, depth, std::move(b).build(kNoNode));
  std::vector<std::vector<unsigned char>> paths(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    // validates range and dimension
    const DyadicCube cube(dim, depth, cells[c]);
    auto& p = paths[c];
    p.resize(static_cast<std::size_t>(depth));
    for (int l = 0; l < depth; ++l) p[l] = static_cast<unsigned char>(child_slot(cube.index(), depth, l));
  }
  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return paths[a] < paths[b]; });
  order.erase(std::unique(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return paths[a] == paths[b]; }),
              order.end());
  const NodeId root = build_range(b, paths, order, 0, order.size(), 0);
  return CellSet(dim, depth, std::move(b).build(root));
}

CellSet CellSet::full_cube(int dim, int depth, const DyadicCube& cube) {
  if (cube.dim() != dim || cube.level() > depth) invalid_input("full_cube: cube incompatible with set");
  CellTreeBuilder b(dim, depth);
  NodeId current = b.leaf(0.0);
  std::vector<NodeId> kids(b.fanout(), current);
  for (int l = depth - 1; l >= cube.level(); --l) {
    std::fill(kids.begin(), kids.end(), current);
    current = b.node(l, 0.0, kids);
  }
  std::vector<unsigned> slots(static_cast<std::size_t>(cube.level()));
  for (int l = 0; l < cube.level(); ++l) slots[l] = child_slot(cube.index(), cube.level(), l);
  const NodeId root = b.path(0, 0.0, slots, current);
  return CellSet(dim, depth, std::move(b).build(root));
}

double CellSet::size() const {
  if (empty()) return 0.0;
  return tree_.leaf_counts()[tree_.root()];
}

bool CellSet::contains(const DyadicCube& cell) const {
  return cell.level() == depth_ && tree_.find(cell) != kNoNode;
}

bool CellSet::meets(const DyadicCube& cube) const {
  if (cube.level() > depth_) invalid_input("meets: cube deeper than set depth");
  return tree_.find(cube) != kNoNode;
}

void CellSet::for_each_cell(const std::function<void(const DyadicCube&)>& fn, double budget) const {
  if (empty()) return;
  if (size() > budget) budget_exhausted("cell enumeration exceeds budget of " + std::to_string(budget) + " cells");
  std::function<void(NodeId, const DyadicCube&)> visit = [&](NodeId id, const DyadicCube& cube) {
    if (tree_.is_leaf(id)) {
      fn(cube);
      return;
    }
    for (unsigned s = 0; s < tree_.fanout(); ++s) {
      const NodeId c = tree_.child(id, s);
      if (c != kNoNode) visit(c, cube.child(s));
    }
  };
  visit(tree_.root(), DyadicCube::root(dim_));
}

std::vector<CubeIndex> CellSet::cells(double budget) const {
  std::vector<CubeIndex> out;
  for_each_cell([&](const DyadicCube& c) { out.push_back(c.index()); }, budget);
  std::sort(out.begin(), out.end());
  return out;
}

CellSet CellSet::coarsened(int level) const {
  if (level < 0 || level > depth_) invalid_input("coarsen level out of range");
  CellTreeBuilder b(dim_, level);
  if (empty()) return CellSet(dim_, level, std::move(b).build(kNoNode));
  std::unordered_map<NodeId, NodeId> memo;
  std::function<NodeId(NodeId)> rebuild = [&](NodeId id) -> NodeId {
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    NodeId out;
    if (tree_.level(id) == level) {
      out = b.leaf(0.0);
    } else {
      std::vector<NodeId> kids(b.fanout(), kNoNode);
      for (unsigned s = 0; s < b.fanout(); ++s) {
        const NodeId c = tree_.child(id, s);
        if (c != kNoNode) kids[s] = rebuild(c);
      }
      out = b.node(tree_.level(id), 0.0, kids);
    }
    memo.emplace(id, out);
    return out;
  };
  const NodeId root = rebuild(tree_.root());
  return CellSet(dim_, level, std::move(b).build(root));
}

CellSet CellSet::refined(int new_depth) const {
  if (new_depth < depth_ || new_depth > kMaxLevel) invalid_input("refine depth out of range");
  CellTreeBuilder b(dim_, new_depth);
  if (empty()) return CellSet(dim_, new_depth, std::move(b).build(kNoNode));
  // full block hanging below an old leaf
  NodeId full = b.leaf(0.0);
  std::vector<NodeId> kids(b.fanout(), kNoNode);
  for (int l = new_depth - 1; l >= depth_; --l) {
    std::fill(kids.begin(), kids.end(), full);
    full = b.node(l, 0.0, kids);
  }
  std::unordered_map<NodeId, NodeId> memo;
  std::function<NodeId(NodeId)> rebuild = [&](NodeId id) -> NodeId {
    if (tree_.is_leaf(id)) return full;
    if (auto it = memo.find(id); it != memo.end()) return it->second;
    std::vector<NodeId> ks(b.fanout(), kNoNode);
    for (unsigned s = 0; s < b.fanout(); ++s) {
      const NodeId c = tree_.child(id, s);
      if (c != kNoNode) ks[s] = rebuild(c);
    }
    const NodeId out = b.node(tree_.level(id), 0.0, ks);
    memo.emplace(id, out);
    return out;
  };
  const NodeId root = rebuild(tree_.root());
  return CellSet(dim_, new_depth, std::move(b).build(root));
}

CellSet CellSet::united(const CellSet& other) const {
  if (other.dim_ != dim_ || other.depth_ != depth_) invalid_input("union of incompatible cell sets");
  if (empty()) return other;
  if (other.empty()) return *this;
  CellTreeBuilder b(dim_, depth_);
  const CellTree& ta = tree_;
  const CellTree& tb = other.tree_;
  std::map<std::pair<NodeId, NodeId>, NodeId> memo;
  // copy of a single subtree is the union with nothing
  std::function<NodeId(NodeId, NodeId)> merge = [&](NodeId a, NodeId c) -> NodeId {
    auto key = std::make_pair(a, c);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const int level = a != kNoNode ? ta.level(a) : tb.level(c);
    NodeId out;
    if (level == depth_) {
      out = b.leaf(0.0);
    } else {
      std::vector<NodeId> kids(b.fanout(), kNoNode);
      for (unsigned s = 0; s < b.fanout(); ++s) {
        const NodeId ca = a != kNoNode ? ta.child(a, s) : kNoNode;
        const NodeId cb = c != kNoNode ? tb.child(c, s) : kNoNode;
        if (ca != kNoNode || cb != kNoNode) kids[s] = merge(ca, cb);
      }
      out = b.node(level, 0.0, kids);
    }
    memo.emplace(key, out);
    return out;
  };
  const NodeId root = merge(ta.root(), tb.root());
  return CellSet(dim_, depth_, std::move(b).build(root));
}

bool CellSet::is_subset_of(const CellSet& other) const {
  if (other.dim_ != dim_ || other.depth_ != depth_) invalid_input("subset test of incompatible cell sets");
  if (empty()) return true;
  if (other.empty()) return false;
  std::map<std::pair<NodeId, NodeId>, bool> memo;
  std::function<bool(NodeId, NodeId)> sub = [&](NodeId a, NodeId c) -> bool {
    if (tree_.is_leaf(a)) return true;
    auto key = std::make_pair(a, c);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool ok = true;
    for (unsigned s = 0; s < tree_.fanout() && ok; ++s) {
      const NodeId ca = tree_.child(a, s);
      if (ca == kNoNode) continue;
      const NodeId cb = other.tree_.child(c, s);
      ok = cb != kNoNode && sub(ca, cb);
    }
    memo.emplace(key, ok);
    return ok;
  };
  return sub(tree_.root(), other.tree_.root());
}

std::optional<DyadicCube> CellSet::sample_cell(Rng& rng) const {
  if (empty()) return std::nullopt;
  const auto counts = tree_.leaf_counts();
  NodeId id = tree_.root();
  DyadicCube cube = DyadicCube::root(dim_);
  while (!tree_.is_leaf(id)) {
    double target = rng.uniform() * counts[id];
    unsigned chosen = 0;
    bool found = false;
    for (unsigned s = 0; s < tree_.fanout(); ++s) {
      const NodeId c = tree_.child(id, s);
      if (c == kNoNode) continue;
      chosen = s;
      found = true;
      if (target < counts[c]) break;
      target -= counts[c];
    }
    if (!found) break;
    id = tree_.child(id, chosen);
    cube = cube.child(chosen);
  }
  return cube;
}

bool CellSet::operator==(const CellSet& other) const {
  if (other.dim_ != dim_ || other.depth_ != depth_) return false;
  if (empty() || other.empty()) return empty() == other.empty();
  return is_subset_of(other) && other.is_subset_of(*this);
}

}  // namespace gmt
