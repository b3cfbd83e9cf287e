#include "gmt/frostman.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <bit>

#include "gmt/error.hpp"
#include "gmt/parallel.hpp"
#include "gmt/random.hpp"

namespace gmt {

namespace {

constexpr double kCapTolerance = 1e-9;
constexpr double kSaturationTolerance = 1e-9;

}  // namespace

CellMeasure build_frostman(const CellSet& set, const Gauge& h) {
  if (set.empty()) invalid_input("build_frostman: empty set");
  const CellTree& t = set.tree();
  const int dim = set.dim();

  // upward sweep: capped subtree mass and the factor applied at each cube
  std::vector<double> capped(t.node_count(), 0.0);
  std::vector<double> factor(t.node_count(), 1.0);
  for (NodeId id = 0; id < t.node_count(); ++id) {
    const double cap = h(cube_diameter(dim, t.level(id)));
    if (t.is_leaf(id)) {
      capped[id] = cap;
      continue;
    }
    double sum = 0.0;
    for (NodeId c : t.children(id)) {
      if (c != kNoNode) sum += capped[c];
    }
    if (sum > cap) {
      capped[id] = cap;
      factor[id] = cap / sum;
    } else {
      capped[id] = sum;
    }
  }

  // flatten: a cube's final mass is its capped mass times the product of the
  // factors of its strict ancestors
  CellTreeBuilder b(dim, set.depth());
  std::map<std::pair<NodeId, std::uint64_t>, NodeId> memo;
  std::function<NodeId(NodeId, double)> flatten = [&](NodeId id, double inherited) -> NodeId {
    const auto key = std::make_pair(id, std::bit_cast<std::uint64_t>(inherited));
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const double mass = inherited == 1.0 ? capped[id] : capped[id] * inherited;
    NodeId out;
    if (t.is_leaf(id)) {
      out = b.leaf(mass);
    } else {
      const double passed = inherited * factor[id];
      std::vector<NodeId> kids(b.fanout(), kNoNode);
      for (unsigned s = 0; s < b.fanout(); ++s) {
        const NodeId c = t.child(id, s);
        if (c != kNoNode) kids[s] = flatten(c, passed);
      }
      out = b.node(t.level(id), mass, kids);
    }
    memo.emplace(key, out);
    return out;
  };
  const NodeId root = flatten(t.root(), 1.0);
  return CellMeasure::from_tree(std::move(b).build(root));
}

FrostmanReport verify_frostman(const CellMeasure& mu, const Gauge& h) {
  FrostmanReport rep;
  rep.gauge_label = h.label();
  rep.note = "cap mu(Q) <= h(diam Q) enforced exactly at finite depth; no 3^n relaxation";
  rep.total_mass = mu.total();
  if (mu.zero()) {
    rep.pass = true;
    return rep;
  }
  const CellTree& t = mu.tree();
  const int dim = mu.dim();
  const auto order = t.reachable();
  const auto addresses = t.first_addresses();
  NodeId worst = kNoNode;
  std::vector<char> saturated(t.node_count(), 0);
  for (NodeId id : order) {
    const double cap = h(cube_diameter(dim, t.level(id)));
    const double m = t.weight(id);
    const double ratio = cap > 0.0 ? m / cap : (m > 0.0 ? INFINITY : 0.0);
    if (worst == kNoNode || ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      worst = id;
    }
    saturated[id] = cap > 0.0 && std::abs(m - cap) <= kSaturationTolerance * cap;
  }
  rep.worst_cube = addresses[worst];

  // maximal saturated cubes: the topmost saturated cube on each branch
  std::vector<double> cost(t.node_count(), 0.0);
  std::vector<double> cubes(t.node_count(), 0.0);
  for (NodeId id = 0; id < t.node_count(); ++id) {
    cubes[id] = 1.0;
    double below = 0.0;
    if (!t.is_leaf(id)) {
      for (NodeId c : t.children(id)) {
        if (c == kNoNode) continue;
        below += cost[c];
        cubes[id] += cubes[c];
      }
    }
    cost[id] = saturated[id] ? h(cube_diameter(dim, t.level(id))) : below;
  }
  rep.saturated_cover_cost = cost[t.root()];
  rep.cubes_checked = cubes[t.root()];
  rep.pass = rep.max_ratio <= 1.0 + kCapTolerance;
  return rep;
}

BallFrostmanReport ball_frostman_check(const CellMeasure& mu, int k, std::size_t samples, std::uint64_t seed) {
  if (k < 1) invalid_input("ball_frostman_check needs k >= 1");
  BallFrostmanReport rep;
  rep.k = k;
  rep.samples = samples;
  if (mu.zero() || samples == 0) return rep;
  const MeasureIndex index(mu);
  const CellSet support = mu.support();
  const int dim = mu.dim();
  const int depth = mu.depth();

  struct Local {
    double constant = 0.0;
    double radius = 0.0;
    Point center;
    double cover = 0.0;
  };
  std::vector<Local> results(samples);
  parallel_for(samples, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    const DyadicCube cell = *support.sample_cell(rng);
    Point x = cell.lower_corner();
    for (auto& c : x) c += rng.uniform() * cell.side();
    Local best;
    best.center = x;
    for (int j = 0; j <= depth; ++j) {
      const double r = std::ldexp(1.0, -j);
      const double rk = std::pow(r, k);
      const double ratio = index.ball_mass(x, r) / rk;
      if (ratio > best.constant) {
        best.constant = ratio;
        best.radius = r;
      }
      // cubes of side >= 2r meet the ball in at most 2^n of them
      const int level = std::max(0, j - 1);
      const DyadicCube home = cube_at(x, level);
      const std::int64_t limit = std::int64_t{1} << level;
      double cover = 0.0;
      const std::size_t n = static_cast<std::size_t>(dim);
      const std::int64_t combos = static_cast<std::int64_t>(std::pow(3, dim));
      for (std::int64_t code = 0; code < combos; ++code) {
        CubeIndex idx(n);
        std::int64_t rest = code;
        bool inside = true;
        for (std::size_t a = 0; a < n; ++a) {
          idx[a] = home.index()[a] + (rest % 3) - 1;
          rest /= 3;
          if (idx[a] < 0 || idx[a] >= limit) inside = false;
        }
        if (!inside) continue;
        const DyadicCube q(dim, level, idx);
        if (q.distance_to(x) <= r) cover += mu.cube_mass(q);
      }
      best.cover = std::max(best.cover, cover / rk);
    }
    results[i] = std::move(best);
  });
  for (const auto& r : results) {
    if (r.constant > rep.constant || rep.worst_center.empty()) {
      if (r.constant >= rep.constant) {
        rep.constant = r.constant;
        rep.worst_center = r.center;
        rep.worst_radius = r.radius;
      }
    }
    rep.cover_constant = std::max(rep.cover_constant, r.cover);
  }
  return rep;
}

}  // namespace gmt
