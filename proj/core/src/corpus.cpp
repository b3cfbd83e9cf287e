#include "gmt/corpus.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "gmt/error.hpp"
#include "gmt/random.hpp"

namespace gmt {

namespace {

void check_shape(const GeneratorSpec& s) {
  if (s.dim < 1 || s.dim > kMaxTreeDim) invalid_input("generate: dimension out of range");
  if (s.depth < 0 || s.depth > kMaxLevel) invalid_input("generate: depth out of range");
}

CellSet plane_patch(const GeneratorSpec& s) {
  if (s.k < 0 || s.k > s.dim) invalid_input("generate: plane-patch needs 0 <= k <= n");
  CellTreeBuilder b(s.dim, s.depth);
  NodeId cur = b.leaf(0.0);
  const unsigned fan = b.fanout();
  for (int l = s.depth - 1; l >= 0; --l) {
    std::vector<NodeId> kids(fan, kNoNode);
    for (unsigned slot = 0; slot < fan; ++slot) {
      if ((slot >> s.k) == 0) kids[slot] = cur;
    }
    cur = b.node(l, 0.0, kids);
  }
  return CellSet::from_tree(std::move(b).build(cur));
}

// Per-axis digit state inside a generation: 0 free, 1 all zeros, 2 all ones.
CellSet product_cantor(const GeneratorSpec& s) {
  const int a = s.ratio_log;
  if (a < 2 || a > 16) invalid_input("generate: product-cantor ratio must be 2^-a with 2 <= a <= 16");
  CellTreeBuilder b(s.dim, s.depth);
  const int n = s.dim;
  const unsigned fan = b.fanout();
  std::map<std::pair<int, std::vector<int>>, NodeId> memo;
  std::function<NodeId(int, const std::vector<int>&)> build = [&](int level, const std::vector<int>& state) -> NodeId {
    if (level == s.depth) return b.leaf(0.0);
    const auto key = std::make_pair(level, state);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const bool closes = (level + 1) % a == 0;
    std::vector<NodeId> kids(fan, kNoNode);
    for (unsigned slot = 0; slot < fan; ++slot) {
      std::vector<int> next(static_cast<std::size_t>(n));
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        const int bit = static_cast<int>((slot >> i) & 1u);
        if (state[i] == 0) {
          next[i] = bit == 0 ? 1 : 2;
        } else {
          ok = (state[i] == 1 && bit == 0) || (state[i] == 2 && bit == 1);
          next[i] = state[i];
        }
      }
      if (!ok) continue;
      if (closes) std::fill(next.begin(), next.end(), 0);
      kids[slot] = build(level + 1, next);
    }
    const NodeId id = b.node(level, 0.0, kids);
    memo.emplace(key, id);
    return id;
  };
  const NodeId root = build(0, std::vector<int>(static_cast<std::size_t>(n), 0));
  return CellSet::from_tree(std::move(b).build(root));
}

std::vector<unsigned> random_slots(Rng& rng, unsigned fan, double p) {
  std::vector<unsigned> out;
  for (unsigned s = 0; s < fan; ++s) {
    if (rng.bernoulli(p)) out.push_back(s);
  }
  if (out.empty()) out.push_back(static_cast<unsigned>(rng.below(fan)));
  return out;
}

void check_density(double p) {
  if (!(p > 0.0 && p <= 1.0)) invalid_input("generate: density must lie in (0, 1]");
}

GeneratedSet random_sparse(const GeneratorSpec& s) {
  check_density(s.density);
  if (s.ell < 1 || s.dim * s.ell > 52) invalid_input("generate: random-sparse needs ell >= 1 with n * ell <= 52");
  std::vector<int> scales;
  for (int l = 1; l + s.ell <= s.depth; l += s.ell + 1) scales.push_back(l);
  const int n = s.dim;
  Rng rng(s.seed);
  CellTreeBuilder b(n, s.depth);
  const unsigned fan = b.fanout();
  std::vector<std::vector<std::pair<CubeIndex, CubeIndex>>> pairs(scales.size());
  std::function<NodeId(const DyadicCube&)> build = [&](const DyadicCube& cube) -> NodeId {
    if (cube.level() == s.depth) return b.leaf(0.0);
    const auto it = std::find(scales.begin(), scales.end(), cube.level());
    if (it != scales.end()) {
      CubeIndex off(static_cast<std::size_t>(n));
      for (auto& o : off) o = static_cast<std::int64_t>(rng.below(std::uint64_t{1} << s.ell));
      CubeIndex sel = cube.index();
      for (int i = 0; i < n; ++i) sel[i] = (sel[i] << s.ell) + off[i];
      pairs[static_cast<std::size_t>(it - scales.begin())].emplace_back(cube.index(), sel);
      const DyadicCube target(n, cube.level() + s.ell, sel);
      std::vector<unsigned> slots(static_cast<std::size_t>(s.ell));
      for (int t = 0; t < s.ell; ++t) slots[t] = child_slot(sel, target.level(), cube.level() + t);
      return b.path(cube.level(), 0.0, slots, build(target));
    }
    std::vector<NodeId> kids(fan, kNoNode);
    for (unsigned slot : random_slots(rng, fan, s.density)) kids[slot] = build(cube.child(slot));
    return b.node(cube.level(), 0.0, kids);
  };
  const NodeId root = build(DyadicCube::root(n));
  GeneratedSet out{CellSet::from_tree(std::move(b).build(root)), SparsityCertificate(n, s.ell)};
  for (std::size_t j = 0; j < scales.size(); ++j) out.certificate->add_scale(scales[j], pairs[j]);
  return out;
}

CellSet random_dense(const GeneratorSpec& s) {
  check_density(s.density);
  Rng rng(s.seed);
  CellTreeBuilder b(s.dim, s.depth);
  const unsigned fan = b.fanout();
  std::function<NodeId(int)> build = [&](int level) -> NodeId {
    if (level == s.depth) return b.leaf(0.0);
    std::vector<NodeId> kids(fan, kNoNode);
    for (unsigned slot : random_slots(rng, fan, s.density)) kids[slot] = build(level + 1);
    return b.node(level, 0.0, kids);
  };
  const NodeId root = build(0);
  return CellSet::from_tree(std::move(b).build(root));
}

}  // namespace

GeneratedSet generate(const GeneratorSpec& spec) {
  check_shape(spec);
  switch (spec.kind) {
    case SetKind::kPlanePatch:
      return {plane_patch(spec), std::nullopt};
    case SetKind::kFourCornerCantor: {
      if (spec.dim != 2) invalid_input("generate: four-corner-cantor lives in the plane");
      GeneratorSpec s = spec;
      s.ratio_log = 2;
      return {product_cantor(s), std::nullopt};
    }
    case SetKind::kProductCantor:
      return {product_cantor(spec), std::nullopt};
    case SetKind::kRandomSparse:
      return random_sparse(spec);
    case SetKind::kRandomDense:
      return {random_dense(spec), std::nullopt};
    case SetKind::kUnion: {
      if (spec.parts.empty()) invalid_input("generate: union needs at least one part");
      std::vector<CellSet> sets;
      int depth = 0;
      for (const GeneratorSpec& p : spec.parts) {
        if (p.dim != spec.dim) invalid_input("generate: union parts must share the dimension");
        sets.push_back(generate(p).set);
        depth = std::max(depth, p.depth);
      }
      CellSet acc(spec.dim, depth);
      for (const CellSet& s : sets) acc = acc.united(s.refined(depth));
      return {acc, std::nullopt};
    }
  }
  invalid_input("generate: unknown kind");
}

SetKind parse_set_kind(const std::string& name) {
  if (name == "plane-patch") return SetKind::kPlanePatch;
  if (name == "four-corner-cantor") return SetKind::kFourCornerCantor;
  if (name == "product-cantor") return SetKind::kProductCantor;
  if (name == "random-sparse") return SetKind::kRandomSparse;
  if (name == "random-dense") return SetKind::kRandomDense;
  if (name == "union") return SetKind::kUnion;
  invalid_input("unknown set kind '" + name + "'");
}

std::string set_kind_name(SetKind kind) {
  switch (kind) {
    case SetKind::kPlanePatch: return "plane-patch";
    case SetKind::kFourCornerCantor: return "four-corner-cantor";
    case SetKind::kProductCantor: return "product-cantor";
    case SetKind::kRandomSparse: return "random-sparse";
    case SetKind::kRandomDense: return "random-dense";
    case SetKind::kUnion: return "union";
  }
  return "unknown";
}

}  // namespace gmt
