#include "gmt/cell_tree.hpp"

#include <bit>
#include <cstring>
#include <functional>

#include "gmt/error.hpp"

namespace gmt {

namespace {

std::uint64_t weight_bits(double w) {
  if (w == 0.0) w = 0.0;  // fold -0 onto +0
  return std::bit_cast<std::uint64_t>(w);
}

}  // namespace

std::span<const NodeId> CellTree::children(NodeId id) const {
  const auto& n = storage_->nodes[id];
  if (n.level == storage_->depth) return {};
  return {storage_->children.data() + n.first_child, fanout()};
}

NodeId CellTree::find(const DyadicCube& cube) const {
  if (empty()) return kNoNode;
  if (cube.dim() != dim() || cube.level() > depth()) return kNoNode;
  NodeId id = root_;
  for (int l = 0; l < cube.level(); ++l) {
    unsigned slot = 0;
    const int shift = cube.level() - l - 1;
    for (int i = 0; i < dim(); ++i) slot |= static_cast<unsigned>((cube.index()[i] >> shift) & 1) << i;
    id = child(id, slot);
    if (id == kNoNode) return kNoNode;
  }
  return id;
}

std::vector<NodeId> CellTree::reachable() const {
  std::vector<NodeId> order;
  if (empty()) return order;
  std::vector<char> seen(node_count(), 0);
  std::vector<NodeId> stack{root_};
  seen[root_] = 1;
  // iterative DFS; push children in reverse so slot 0 is visited first
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    order.push_back(id);
    if (is_leaf(id)) continue;
    for (unsigned s = fanout(); s-- > 0;) {
      const NodeId c = child(id, s);
      if (c != kNoNode && !seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  return order;
}

std::vector<DyadicCube> CellTree::first_addresses() const {
  std::vector<DyadicCube> addr(node_count(), DyadicCube::root(std::max(1, dim())));
  if (empty()) return addr;
  std::vector<char> seen(node_count(), 0);
  std::function<void(NodeId, const DyadicCube&)> visit = [&](NodeId id, const DyadicCube& cube) {
    seen[id] = 1;
    addr[id] = cube;
    if (is_leaf(id)) return;
    for (unsigned s = 0; s < fanout(); ++s) {
      const NodeId c = child(id, s);
      if (c != kNoNode && !seen[c]) visit(c, cube.child(s));
    }
  };
  visit(root_, DyadicCube::root(dim()));
  return addr;
}

std::vector<double> CellTree::leaf_counts() const {
  std::vector<double> counts(node_count(), 0.0);
  // children are always interned before their parents, so ids are a
  // topological order
  for (NodeId id = 0; id < node_count(); ++id) {
    if (is_leaf(id)) {
      counts[id] = 1.0;
      continue;
    }
    double c = 0.0;
    for (NodeId ch : children(id)) {
      if (ch != kNoNode) c += counts[ch];
    }
    counts[id] = c;
  }
  return counts;
}

double CellTree::cube_count() const {
  if (empty()) return 0.0;
  std::vector<double> counts(node_count(), 0.0);
  for (NodeId id = 0; id < node_count(); ++id) {
    double c = 1.0;
    if (!is_leaf(id)) {
      for (NodeId ch : children(id)) {
        if (ch != kNoNode) c += counts[ch];
      }
    }
    counts[id] = c;
  }
  return counts[root_];
}

std::size_t CellTreeBuilder::Hash::operator()(NodeId id) const noexcept {
  const auto& n = s->nodes[id];
  std::uint64_t h = static_cast<std::uint64_t>(n.level) * 0x9e3779b97f4a7c15ULL;
  h ^= weight_bits(n.weight) + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2);
  if (n.level != s->depth) {
    const unsigned fanout = 1u << s->dim;
    for (unsigned i = 0; i < fanout; ++i) {
      h ^= static_cast<std::uint64_t>(s->children[n.first_child + i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
  }
  return static_cast<std::size_t>(h);
}

bool CellTreeBuilder::Equal::operator()(NodeId a, NodeId b) const noexcept {
  const auto& x = s->nodes[a];
  const auto& y = s->nodes[b];
  if (x.level != y.level || weight_bits(x.weight) != weight_bits(y.weight)) return false;
  if (x.level == s->depth) return true;
  const unsigned fanout = 1u << s->dim;
  return std::memcmp(s->children.data() + x.first_child, s->children.data() + y.first_child,
                     fanout * sizeof(NodeId)) == 0;
}

CellTreeBuilder::CellTreeBuilder(int dim, int depth)
    : storage_(std::make_shared<detail::TreeStorage>()),
      index_(64, Hash{nullptr}, Equal{nullptr}) {
  if (dim < 1 || dim > kMaxTreeDim) invalid_input("tree dimension must be in [1, " + std::to_string(kMaxTreeDim) + "]");
  if (depth < 0 || depth > kMaxLevel) invalid_input("tree depth out of range");
  storage_->dim = dim;
  storage_->depth = depth;
  index_ = std::unordered_set<NodeId, Hash, Equal>(64, Hash{storage_.get()}, Equal{storage_.get()});
}

NodeId CellTreeBuilder::intern() {
  const NodeId candidate = static_cast<NodeId>(storage_->nodes.size() - 1);
  auto [it, inserted] = index_.insert(candidate);
  if (inserted) return candidate;
  const auto& n = storage_->nodes.back();
  if (n.level != storage_->depth) storage_->children.resize(n.first_child);
  storage_->nodes.pop_back();
  return *it;
}

NodeId CellTreeBuilder::leaf(double weight) {
  if (storage_->nodes.size() >= kNoNode - 1) budget_exhausted("tree node limit reached");
  storage_->nodes.push_back({storage_->depth, weight, 0});
  return intern();
}

NodeId CellTreeBuilder::node(int level, double weight, std::span<const NodeId> children) {
  if (level < 0 || level >= storage_->depth) invalid_input("interior node level out of range");
  if (children.size() != fanout()) invalid_input("interior node needs fanout children");
  bool any = false;
  for (NodeId c : children) {
    if (c == kNoNode) continue;
    if (storage_->nodes[c].level != level + 1) invalid_input("child level mismatch");
    any = true;
  }
  if (!any) invalid_input("interior node without children");
  if (storage_->nodes.size() >= kNoNode - 1) budget_exhausted("tree node limit reached");
  const auto first = static_cast<std::uint32_t>(storage_->children.size());
  storage_->children.insert(storage_->children.end(), children.begin(), children.end());
  storage_->nodes.push_back({level, weight, first});
  return intern();
}

NodeId CellTreeBuilder::path(int level, double weight, std::span<const unsigned> slots, NodeId target) {
  NodeId current = target;
  std::vector<NodeId> kids(fanout(), kNoNode);
  for (std::size_t i = slots.size(); i-- > 0;) {
    std::fill(kids.begin(), kids.end(), kNoNode);
    kids[slots[i]] = current;
    current = node(level + static_cast<int>(i), weight, kids);
  }
  return current;
}

CellTree CellTreeBuilder::build(NodeId root) && {
  CellTree tree;
  tree.storage_ = std::move(storage_);
  tree.root_ = root;
  index_.clear();
  return tree;
}

}  // namespace gmt
