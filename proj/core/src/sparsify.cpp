#include "gmt/sparsify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "gmt/error.hpp"

namespace gmt {

namespace {

constexpr double kCapTolerance = 1e-9;
constexpr double kTieTolerance = 1e-12;

using PairKey = std::pair<NodeId, NodeId>;

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

// h(d_l) / d_l^k for l = 0..levels.
std::vector<double> ratio_table(const Gauge& h, int dim, int k, int levels) {
  std::vector<double> r(static_cast<std::size_t>(levels) + 1);
  for (int l = 0; l <= levels; ++l) {
    const double d = cube_diameter(dim, l);
    r[l] = h(d) / std::pow(d, k);
  }
  return r;
}

}  // namespace

SparsityCertificate::SparsityCertificate(int dim, int ell) : dim_(dim), ell_(ell) {
  if (dim < 1 || dim > kMaxTreeDim) invalid_input("certificate: bad dimension");
  if (ell < 1 || dim * ell > 52) invalid_input("certificate: ell must be >= 1 with n * ell <= 52");
}

void SparsityCertificate::add_scale(int level, CellTree family) {
  if (level < 0 || level + ell_ > kMaxLevel) invalid_input("certificate: scale out of range");
  if (!scales_.empty() && level < scales_.back() + ell_)
    invalid_input("certificate: scales must be separated by at least ell");
  if (!family.empty() && (family.dim() != dim_ || family.depth() != level))
    invalid_input("certificate: family does not match its scale");
  if (family.empty() && family.dim() != dim_) family = CellTreeBuilder(dim_, level).build(kNoNode);
  const double limit = std::ldexp(1.0, dim_ * ell_);
  for (NodeId id : family.reachable()) {
    if (!family.is_leaf(id)) continue;
    const double w = family.weight(id);
    if (!(w >= 0.0) || w >= limit || w != std::floor(w)) invalid_input("certificate: bad offset code");
  }
  scales_.push_back(level);
  families_.push_back(std::move(family));
}

void SparsityCertificate::add_scale(int level, std::span<const std::pair<CubeIndex, CubeIndex>> pairs) {
  if (level < 0 || level + ell_ > kMaxLevel) invalid_input("certificate: scale out of range");
  std::map<CubeIndex, double> codes;
  for (const auto& [q, qp] : pairs) {
    if (q.size() != static_cast<std::size_t>(dim_) || qp.size() != q.size())
      invalid_input("certificate: pair has the wrong dimension");
    DyadicCube cq(dim_, level, q);
    DyadicCube cqp(dim_, level + ell_, qp);
    if (!cq.contains(cqp)) invalid_input("certificate: selected cube " + cqp.to_string() + " not inside " + cq.to_string());
    CubeIndex off(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) off[i] = qp[i] - (q[i] << ell_);
    const double code = encode_offset(off);
    auto [it, fresh] = codes.emplace(q, code);
    if (!fresh && it->second != code) invalid_input("certificate: two selections inside " + cq.to_string());
  }
  std::vector<std::pair<std::vector<unsigned char>, double>> items;
  items.reserve(codes.size());
  for (const auto& [q, code] : codes) {
    std::vector<unsigned char> path(static_cast<std::size_t>(level));
    for (int l = 0; l < level; ++l) path[l] = static_cast<unsigned char>(child_slot(q, level, l));
    items.emplace_back(std::move(path), code);
  }
  std::sort(items.begin(), items.end());
  CellTreeBuilder b(dim_, level);
  std::function<NodeId(std::size_t, std::size_t, int)> build = [&](std::size_t first, std::size_t last, int l) -> NodeId {
    if (l == level) return b.leaf(items[first].second);
    std::vector<NodeId> kids(b.fanout(), kNoNode);
    std::size_t i = first;
    while (i < last) {
      const unsigned s = items[i].first[l];
      std::size_t j = i;
      while (j < last && items[j].first[l] == s) ++j;
      kids[s] = build(i, j, l + 1);
      i = j;
    }
    return b.node(l, 0.0, kids);
  };
  const NodeId root = items.empty() ? kNoNode : build(0, items.size(), 0);
  add_scale(level, std::move(b).build(root));
}

CubeIndex SparsityCertificate::decode_offset(double code) const {
  auto c = static_cast<std::uint64_t>(code);
  CubeIndex off(static_cast<std::size_t>(dim_));
  const std::uint64_t mask = (std::uint64_t{1} << ell_) - 1;
  for (int i = 0; i < dim_; ++i) off[i] = static_cast<std::int64_t>((c >> (ell_ * i)) & mask);
  return off;
}

double SparsityCertificate::encode_offset(std::span<const std::int64_t> offset) const {
  std::uint64_t c = 0;
  for (int i = 0; i < dim_; ++i) {
    if (offset[i] < 0 || offset[i] >= (std::int64_t{1} << ell_)) invalid_input("certificate: offset out of range");
    c |= static_cast<std::uint64_t>(offset[i]) << (ell_ * i);
  }
  return static_cast<double>(c);
}

std::optional<DyadicCube> SparsityCertificate::selected(std::size_t j, const DyadicCube& q) const {
  const int level = scale(j);
  if (q.level() != level || q.dim() != dim_) invalid_input("certificate: query cube is not at scale " + std::to_string(j));
  const CellTree& f = families_[j];
  const NodeId id = f.find(q);
  if (id == kNoNode) return std::nullopt;
  CubeIndex idx = decode_offset(f.weight(id));
  for (int i = 0; i < dim_; ++i) idx[i] += q.index()[i] << ell_;
  return DyadicCube(dim_, level + ell_, std::move(idx));
}

double SparsityCertificate::selection_count(std::size_t j) const {
  const CellTree& f = family(j);
  if (f.empty()) return 0.0;
  return f.leaf_counts()[f.root()];
}

std::vector<std::pair<CubeIndex, CubeIndex>> SparsityCertificate::pairs(std::size_t j, double budget) const {
  if (selection_count(j) > budget) budget_exhausted("certificate: too many selections to list");
  std::vector<std::pair<CubeIndex, CubeIndex>> out;
  const CellTree& f = family(j);
  if (f.empty()) return out;
  std::function<void(NodeId, const DyadicCube&)> walk = [&](NodeId id, const DyadicCube& cube) {
    if (f.is_leaf(id)) {
      CubeIndex sel = decode_offset(f.weight(id));
      for (int i = 0; i < dim_; ++i) sel[i] += cube.index()[i] << ell_;
      out.emplace_back(cube.index(), std::move(sel));
      return;
    }
    for (unsigned s = 0; s < f.fanout(); ++s) {
      const NodeId c = f.child(id, s);
      if (c != kNoNode) walk(c, cube.child(s));
    }
  };
  walk(f.root(), DyadicCube::root(dim_));
  std::sort(out.begin(), out.end());
  return out;
}

int min_sparsity_parameter(int n, int k, AlphaMode mode) {
  if (n < 1 || k < 1 || k >= n) invalid_input("min_sparsity_parameter: need 1 <= k < n");
  double alpha;
  if (mode == AlphaMode::kExactDiagonal) {
    if (k != 1) invalid_input("min_sparsity_parameter: exact-diagonal bound is only known for k = 1");
    alpha = std::sqrt(static_cast<double>(n));
  } else {
    alpha = unit_ball_volume(k) * std::pow(std::sqrt(static_cast<double>(n)) / 2.0, k);
  }
  const double rhs = unit_ball_volume(k) * std::ldexp(1.0, -k);
  const double lhs0 = std::pow(3.0, n) * alpha;
  for (int ell = 1; ell <= 60; ++ell) {
    if (lhs0 * std::ldexp(1.0, -ell * k) < rhs) return ell;
  }
  invalid_input("min_sparsity_parameter: no ell below 60");
}

SparseResult build_sparse_measure(const CellMeasure& mu, const Gauge& h, int k, int ell, SparseOptions options) {
  if (mu.zero()) invalid_input("build_sparse_measure: zero measure");
  const int dim = mu.dim();
  const int depth = mu.depth();
  if (k < 1 || k >= dim) invalid_input("build_sparse_measure: need 1 <= k < n");
  if (ell < 1) invalid_input("build_sparse_measure: ell must be positive");
  SparseResult res;
  res.certificate = SparsityCertificate(dim, ell);

  const std::vector<double> ratio = ratio_table(h, dim, k, depth);
  bool nonincreasing = true;
  for (std::size_t l = 1; l < ratio.size(); ++l) {
    if (ratio[l] > ratio[l - 1] * (1.0 + 1e-12)) nonincreasing = false;
  }
  if (!nonincreasing || !(ratio.back() < ratio.front()))
    invalid_input("build_sparse_measure: gauge " + h.label() + " fails the vanishing check h(d)/d^k -> 0");

  // scale j >= 1 needs h(d_l)/d_l^k <= 2^(-n j ell) for every level in [l_j, depth]
  std::vector<double> tail_max(ratio.size());
  tail_max.back() = ratio.back();
  for (std::size_t l = ratio.size() - 1; l-- > 0;) tail_max[l] = std::max(ratio[l], tail_max[l + 1]);
  std::vector<int> scales;
  for (int j = 1;; ++j) {
    const int lower = scales.empty() ? 0 : scales.back() + ell;
    const double threshold = std::ldexp(1.0, -dim * j * ell);
    int found = -1;
    for (int l = lower; l + ell <= depth; ++l) {
      if (tail_max[l] <= threshold) {
        found = l;
        break;
      }
    }
    if (found < 0) break;
    scales.push_back(found);
  }
  if (scales.empty()) {
    const double threshold = std::ldexp(1.0, -dim * ell);
    int need = -1;
    for (int l = 0; l <= 1000 - ell; ++l) {
      const double d = cube_diameter(dim, l);
      if (h(d) / std::pow(d, k) <= threshold) {
        need = l + ell;
        break;
      }
    }
    std::ostringstream msg;
    msg << "build_sparse_measure: depth " << depth << " too shallow for one scale with ell = " << ell;
    if (need > 0)
      msg << "; required depth " << need;
    else
      msg << "; no depth up to 1000 suffices";
    budget_exhausted(msg.str());
  }

  res.input_total = mu.total();
  CellMeasure nu = mu;
  if (std::abs(res.input_total - 1.0) > 1e-12) {
    nu = mu.scaled(1.0 / res.input_total);
    res.normalized = true;
  }
  res.mass_factor = std::max(1.0, 1.0 / res.input_total);
  res.gauge_constant = std::max(1.0, *std::max_element(ratio.begin(), ratio.end()));
  res.rescale_constant = res.mass_factor * res.gauge_constant;
  if (options.keep_history) res.history.push_back(nu);

  const unsigned fan = 1u << dim;
  for (int L : scales) {
    const CellTree& t = nu.tree();
    CellTreeBuilder b(dim, depth);
    CellTreeBuilder fb(dim, L);
    std::map<std::pair<NodeId, std::uint64_t>, NodeId> scale_memo;
    std::function<NodeId(NodeId, double)> scaled = [&](NodeId id, double c) -> NodeId {
      const auto key = std::make_pair(id, bits(c));
      if (auto it = scale_memo.find(key); it != scale_memo.end()) return it->second;
      const double w = c == 1.0 ? t.weight(id) : t.weight(id) * c;
      NodeId out;
      if (t.is_leaf(id)) {
        out = b.leaf(w);
      } else {
        std::vector<NodeId> kids(fan, kNoNode);
        for (unsigned s = 0; s < fan; ++s) {
          const NodeId ch = t.child(id, s);
          if (ch != kNoNode) kids[s] = scaled(ch, c);
        }
        out = b.node(t.level(id), w, kids);
      }
      scale_memo.emplace(key, out);
      return out;
    };

    struct Pick {
      NodeId node = kNoNode;
      double mass = -1.0;
      CubeIndex offset;
      std::vector<unsigned> slots;
    };
    // heaviest descendant ell levels below; ties (up to rounding) go to the
    // smallest offset
    auto select = [&](NodeId q) {
      Pick best;
      CubeIndex off(static_cast<std::size_t>(dim), 0);
      std::vector<unsigned> slots;
      std::function<void(NodeId, int)> walk = [&](NodeId id, int dl) {
        if (dl == ell) {
          const double m = t.weight(id);
          const double tol = kTieTolerance * std::max(m, best.mass);
          if (m > best.mass + tol || (m >= best.mass - tol && off < best.offset)) {
            best.node = id;
            best.mass = m;
            best.offset = off;
            best.slots = slots;
          }
          return;
        }
        for (unsigned s = 0; s < fan; ++s) {
          const NodeId ch = t.child(id, s);
          if (ch == kNoNode) continue;
          for (int i = 0; i < dim; ++i) off[i] = off[i] * 2 + ((s >> i) & 1u);
          slots.push_back(s);
          walk(ch, dl + 1);
          slots.pop_back();
          for (int i = 0; i < dim; ++i) off[i] >>= 1;
        }
      };
      walk(q, 0);
      return best;
    };

    std::vector<NodeId> memo(t.node_count(), kNoNode);
    std::vector<NodeId> fmemo(t.node_count(), kNoNode);
    std::function<void(NodeId)> transform = [&](NodeId id) {
      if (memo[id] != kNoNode) return;
      if (t.level(id) == L) {
        const Pick p = select(id);
        const double m = t.weight(id);
        const NodeId target = scaled(p.node, m / p.mass);
        memo[id] = b.path(L, m, p.slots, target);
        fmemo[id] = fb.leaf(res.certificate.encode_offset(p.offset));
        return;
      }
      std::vector<NodeId> kids(fan, kNoNode);
      std::vector<NodeId> fkids(fan, kNoNode);
      for (unsigned s = 0; s < fan; ++s) {
        const NodeId ch = t.child(id, s);
        if (ch == kNoNode) continue;
        transform(ch);
        kids[s] = memo[ch];
        fkids[s] = fmemo[ch];
      }
      memo[id] = b.node(t.level(id), t.weight(id), kids);
      fmemo[id] = fb.node(t.level(id), 0.0, fkids);
    };
    transform(t.root());
    const NodeId root = memo[t.root()];
    const NodeId froot = fmemo[t.root()];
    nu = CellMeasure::from_tree(std::move(b).build(root));
    res.certificate.add_scale(L, std::move(fb).build(froot));
    if (options.keep_history) res.history.push_back(nu);
  }
  res.measure = std::move(nu);
  return res;
}

SparseCapReport check_sparse_caps(const SparseResult& result, const Gauge& h, int k) {
  SparseCapReport rep;
  const CellMeasure& nu = result.measure;
  if (nu.zero()) {
    rep.pass = true;
    return rep;
  }
  const CellTree& t = nu.tree();
  const int dim = nu.dim();
  const double growth =
      std::ldexp(result.mass_factor, dim * static_cast<int>(result.certificate.scale_count()) * result.certificate.ell());
  double worst = -1.0;
  NodeId worst_id = kNoNode;
  for (NodeId id : t.reachable()) {
    const double d = cube_diameter(dim, t.level(id));
    const double m = t.weight(id);
    const double rg = m / (growth * h(d));
    const double rr = m / (result.rescale_constant * std::pow(d, k));
    rep.max_ratio_gauge = std::max(rep.max_ratio_gauge, rg);
    rep.max_ratio_rescaled = std::max(rep.max_ratio_rescaled, rr);
    if (std::max(rg, rr) > worst) {
      worst = std::max(rg, rr);
      worst_id = id;
    }
  }
  if (worst_id != kNoNode) rep.worst_cube = t.first_addresses()[worst_id];
  rep.pass = rep.max_ratio_gauge <= 1.0 + kCapTolerance && rep.max_ratio_rescaled <= 1.0 + kCapTolerance;
  return rep;
}

double max_coarse_mass_deviation(const CellMeasure& next, const CellMeasure& prev, int level) {
  if (next.dim() != prev.dim() || next.depth() != prev.depth()) invalid_input("coarse deviation: measures differ in shape");
  if (level < 0 || level > next.depth()) invalid_input("coarse deviation: level out of range");
  const CellTree& a = next.tree();
  const CellTree& b = prev.tree();
  const unsigned fan = 1u << next.dim();
  std::map<PairKey, double> memo;
  std::function<double(NodeId, NodeId, int)> walk = [&](NodeId x, NodeId y, int l) -> double {
    const double ma = x == kNoNode ? 0.0 : a.weight(x);
    const double mb = y == kNoNode ? 0.0 : b.weight(y);
    const double scale = std::max(ma, mb);
    double dev = scale > 0.0 ? std::abs(ma - mb) / scale : 0.0;
    if (l == level) return dev;
    if (auto it = memo.find({x, y}); it != memo.end()) return it->second;
    for (unsigned s = 0; s < fan; ++s) {
      const NodeId cx = x == kNoNode ? kNoNode : a.child(x, s);
      const NodeId cy = y == kNoNode ? kNoNode : b.child(y, s);
      if (cx == kNoNode && cy == kNoNode) continue;
      dev = std::max(dev, walk(cx, cy, l + 1));
    }
    memo.emplace(PairKey{x, y}, dev);
    return dev;
  };
  const NodeId ra = next.zero() ? kNoNode : a.root();
  const NodeId rb = prev.zero() ? kNoNode : b.root();
  if (ra == kNoNode && rb == kNoNode) return 0.0;
  return walk(ra, rb, 0);
}

bool check_sparse(const CellSet& set, const SparsityCertificate& cert) {
  if (set.dim() != cert.dim()) invalid_input("check_sparse: dimension mismatch");
  for (int l : cert.scales()) {
    if (l + cert.ell() > set.depth())
      invalid_input("check_sparse: scale " + std::to_string(l) + " plus ell exceeds set depth " + std::to_string(set.depth()));
  }
  if (set.empty()) return true;
  const CellTree& e = set.tree();
  const unsigned fan = 1u << set.dim();
  const int ell = cert.ell();
  for (std::size_t j = 0; j < cert.scale_count(); ++j) {
    const CellTree& f = cert.family(j);
    const int L = cert.scale(j);
    // E below a chosen cube must follow the coded offset for ell levels
    auto follows = [&](NodeId id, const CubeIndex& off) {
      for (int t = 0; t < ell; ++t) {
        unsigned want = 0;
        for (int i = 0; i < set.dim(); ++i) want |= static_cast<unsigned>((off[i] >> (ell - 1 - t)) & 1) << i;
        for (unsigned s = 0; s < fan; ++s) {
          if (s != want && e.child(id, s) != kNoNode) return false;
        }
        id = e.child(id, want);
        if (id == kNoNode) return false;
      }
      return true;
    };
    std::map<PairKey, bool> memo;
    std::function<bool(NodeId, NodeId)> ok = [&](NodeId x, NodeId y) -> bool {
      if (y == kNoNode) return false;
      if (e.level(x) == L) return follows(x, cert.decode_offset(f.weight(y)));
      if (auto it = memo.find({x, y}); it != memo.end()) return it->second;
      bool good = true;
      for (unsigned s = 0; s < fan && good; ++s) {
        const NodeId cx = e.child(x, s);
        if (cx != kNoNode) good = ok(cx, f.child(y, s));
      }
      memo.emplace(PairKey{x, y}, good);
      return good;
    };
    if (!ok(e.root(), f.empty() ? kNoNode : f.root())) return false;
  }
  return true;
}

}  // namespace gmt
