#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <unordered_set>
#include <vector>

#include "gmt/lattice.hpp"

namespace gmt {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Largest ambient dimension supported by the tree representation.
inline constexpr int kMaxTreeDim = 12;

namespace detail {

struct TreeNode {
  int level;
  double weight;
  std::uint32_t first_child;  // offset into TreeStorage::children; unused at leaves
};

struct TreeStorage {
  int dim = 0;
  int depth = 0;
  std::vector<TreeNode> nodes;
  std::vector<NodeId> children;
};

}  // namespace detail

/// Immutable 2^n-ary dyadic tree truncated at `depth`. Nodes are hash-consed:
/// two cubes whose subtrees carry identical levels, weights and shapes share
/// one node, so self-similar sets at depth 40 stay small. A node at level
/// `depth` is a leaf (a cell); absent children are kNoNode.
///
/// The per-node weight is interpreted by the wrapper types: CellSet ignores
/// it, CellMeasure stores the cube's absolute mass, certificate families
/// store a subcube offset code at their leaves.
class CellTree {
 public:
  CellTree() = default;

  int dim() const noexcept { return storage_ ? storage_->dim : 0; }
  int depth() const noexcept { return storage_ ? storage_->depth : 0; }
  unsigned fanout() const noexcept { return 1u << dim(); }
  NodeId root() const noexcept { return root_; }
  bool empty() const noexcept { return root_ == kNoNode; }
  std::size_t node_count() const noexcept { return storage_ ? storage_->nodes.size() : 0; }

  int level(NodeId id) const { return storage_->nodes[id].level; }
  double weight(NodeId id) const { return storage_->nodes[id].weight; }
  bool is_leaf(NodeId id) const { return storage_->nodes[id].level == storage_->depth; }
  NodeId child(NodeId id, unsigned slot) const {
    return storage_->children[storage_->nodes[id].first_child + slot];
  }
  std::span<const NodeId> children(NodeId id) const;

  /// Node of the cube `cube`, or kNoNode when the cube is not in the tree.
  NodeId find(const DyadicCube& cube) const;

  /// Nodes reachable from the root in first-visit DFS order (children in
  /// slot order). Every reachable node appears once.
  std::vector<NodeId> reachable() const;

  /// For every reachable node, the address of the cube where the DFS first
  /// met it. Indexed by node id; unreachable ids hold the root.
  std::vector<DyadicCube> first_addresses() const;

  /// Number of cubes represented by each node's subtree at the leaf level,
  /// indexed by node id (floating point: may exceed 2^64).
  std::vector<double> leaf_counts() const;

  /// Number of distinct cubes (all levels) equal to the exploded tree.
  double cube_count() const;

 private:
  friend class CellTreeBuilder;
  std::shared_ptr<const detail::TreeStorage> storage_;
  NodeId root_ = kNoNode;
};

/// Builds a CellTree bottom-up with structural sharing.
class CellTreeBuilder {
 public:
  CellTreeBuilder(int dim, int depth);

  int dim() const noexcept { return storage_->dim; }
  int depth() const noexcept { return storage_->depth; }
  unsigned fanout() const noexcept { return 1u << storage_->dim; }

  NodeId leaf(double weight);

  /// Interior node at `level` < depth. `children` has fanout() entries; at
  /// least one must be present.
  NodeId node(int level, double weight, std::span<const NodeId> children);

  int level(NodeId id) const { return storage_->nodes[id].level; }
  double weight(NodeId id) const { return storage_->nodes[id].weight; }
  NodeId child(NodeId id, unsigned slot) const {
    return storage_->children[storage_->nodes[id].first_child + slot];
  }

  /// Chain of single-child nodes from `level` down to `target` (which sits
  /// at level + slots.size()); every chain node gets `weight`.
  NodeId path(int level, double weight, std::span<const unsigned> slots, NodeId target);

  CellTree build(NodeId root) &&;

 private:
  struct Hash {
    const detail::TreeStorage* s;
    std::size_t operator()(NodeId id) const noexcept;
  };
  struct Equal {
    const detail::TreeStorage* s;
    bool operator()(NodeId a, NodeId b) const noexcept;
  };

  NodeId intern();

  std::shared_ptr<detail::TreeStorage> storage_;
  std::unordered_set<NodeId, Hash, Equal> index_;
};

}  // namespace gmt
