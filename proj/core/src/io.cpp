#include "gmt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "gmt/error.hpp"

namespace gmt {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    invalid_input(std::string(what) + ": malformed JSON: " + e.what());
  }
}

template <class T>
T field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) invalid_input(std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid_input(std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

void append_index(std::string& out, const CubeIndex& idx) {
  out += '[';
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(idx[i]);
  }
  out += ']';
}

// Nodes in DFS post-order so every child precedes its parents.
std::string tree_to_dag(const CellTree& t) {
  std::unordered_map<NodeId, std::size_t> number;
  std::vector<NodeId> order;
  std::function<void(NodeId)> visit = [&](NodeId id) {
    if (number.count(id)) return;
    if (!t.is_leaf(id)) {
      for (NodeId c : t.children(id)) {
        if (c != kNoNode) visit(c);
      }
    }
    number.emplace(id, order.size());
    order.push_back(id);
  };
  if (!t.empty()) visit(t.root());
  std::string out = "{\"root\": ";
  out += t.empty() ? "-1" : std::to_string(number.at(t.root()));
  out += ", \"nodes\": [";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const NodeId id = order[i];
    out += i ? ",\n" : "\n";
    out += '[' + std::to_string(t.level(id)) + ',' + format_double(t.weight(id)) + ",[";
    if (!t.is_leaf(id)) {
      bool first = true;
      for (NodeId c : t.children(id)) {
        if (!first) out += ',';
        first = false;
        out += c == kNoNode ? "-1" : std::to_string(number.at(c));
      }
    }
    out += "]]";
  }
  out += "]}";
  return out;
}

CellTree tree_from_dag(const json& dag, int dim, int depth, const char* what) {
  CellTreeBuilder b(dim, depth);
  const auto root = field<long long>(dag, "root", what);
  if (!dag.contains("nodes") || !dag["nodes"].is_array()) invalid_input(std::string(what) + ": dag without nodes");
  std::vector<NodeId> ids;
  try {
    for (const json& node : dag["nodes"]) {
      const int level = node.at(0).get<int>();
      const double weight = node.at(1).get<double>();
      const json& kids = node.at(2);
      if (level < 0 || level > depth) invalid_input(std::string(what) + ": dag node level out of range");
      if (level == depth) {
        if (!kids.empty()) invalid_input(std::string(what) + ": dag leaf with children");
        ids.push_back(b.leaf(weight));
        continue;
      }
      std::vector<NodeId> children;
      for (const json& c : kids) {
        const long long ci = c.get<long long>();
        if (ci < -1 || ci >= static_cast<long long>(ids.size()))
          invalid_input(std::string(what) + ": dag child must precede its parent");
        children.push_back(ci < 0 ? kNoNode : ids[static_cast<std::size_t>(ci)]);
      }
      ids.push_back(b.node(level, weight, children));
    }
  } catch (const json::exception& e) {
    invalid_input(std::string(what) + ": bad dag node: " + e.what());
  }
  if (root < -1 || root >= static_cast<long long>(ids.size())) invalid_input(std::string(what) + ": dag root out of range");
  const NodeId r = root < 0 ? kNoNode : ids[static_cast<std::size_t>(root)];
  if (r != kNoNode && b.level(r) != 0) invalid_input(std::string(what) + ": dag root is not at level 0");
  return std::move(b).build(r);
}

CubeIndex index_of(const json& j, int dim, const char* what) {
  CubeIndex idx;
  try {
    idx = j.get<CubeIndex>();
  } catch (const json::exception& e) {
    invalid_input(std::string(what) + ": bad cube index: " + e.what());
  }
  if (static_cast<int>(idx.size()) != dim) invalid_input(std::string(what) + ": cube index has the wrong dimension");
  return idx;
}

std::string header(int n, int depth) {
  return "{\"n\": " + std::to_string(n) + ", \"depth\": " + std::to_string(depth);
}

}  // namespace

std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

std::string set_to_json(const CellSet& set) {
  std::string out = header(set.dim(), set.depth());
  if (set.size() > kExplicitListLimit) return out + ", \"dag\": " + tree_to_dag(set.tree()) + "}\n";
  out += ", \"cells\": [";
  bool first = true;
  for (const CubeIndex& c : set.cells(kExplicitListLimit)) {
    out += first ? "\n" : ",\n";
    first = false;
    append_index(out, c);
  }
  return out + "]}\n";
}

CellSet set_from_json(const std::string& text) {
  const json j = parse(text, "set");
  const int n = field<int>(j, "n", "set");
  const int depth = field<int>(j, "depth", "set");
  if (n < 1 || n > kMaxTreeDim || depth < 0 || depth > kMaxLevel) invalid_input("set: bad n or depth");
  if (j.contains("dag")) return CellSet::from_tree(tree_from_dag(j["dag"], n, depth, "set"));
  if (!j.contains("cells") || !j["cells"].is_array()) invalid_input("set: missing field 'cells'");
  std::vector<CubeIndex> cells;
  for (const json& c : j["cells"]) {
    CubeIndex idx = index_of(c, n, "set");
    DyadicCube(n, depth, idx);  // validates the range
    cells.push_back(std::move(idx));
  }
  return CellSet::from_cells(n, depth, cells);
}

std::string measure_to_json(const CellMeasure& mu) {
  std::string out = header(mu.dim(), mu.depth());
  if (mu.support().size() > kExplicitListLimit) return out + ", \"dag\": " + tree_to_dag(mu.tree()) + "}\n";
  out += ", \"masses\": [";
  bool first = true;
  for (const auto& [c, m] : mu.entries(kExplicitListLimit)) {
    out += first ? "\n" : ",\n";
    first = false;
    out += '[';
    append_index(out, c);
    out += ',' + format_double(m) + ']';
  }
  return out + "]}\n";
}

CellMeasure measure_from_json(const std::string& text) {
  const json j = parse(text, "measure");
  const int n = field<int>(j, "n", "measure");
  const int depth = field<int>(j, "depth", "measure");
  if (n < 1 || n > kMaxTreeDim || depth < 0 || depth > kMaxLevel) invalid_input("measure: bad n or depth");
  if (j.contains("dag")) {
    CellTree t = tree_from_dag(j["dag"], n, depth, "measure");
    if (t.empty()) return CellMeasure(n, depth);
    return CellMeasure::from_tree(std::move(t));
  }
  if (!j.contains("masses") || !j["masses"].is_array()) invalid_input("measure: missing field 'masses'");
  std::vector<std::pair<CubeIndex, double>> masses;
  for (const json& e : j["masses"]) {
    if (!e.is_array() || e.size() != 2) invalid_input("measure: entries must be [index, mass]");
    CubeIndex idx = index_of(e[0], n, "measure");
    DyadicCube(n, depth, idx);
    double m = 0.0;
    try {
      m = e[1].get<double>();
    } catch (const json::exception&) {
      invalid_input("measure: mass must be a number");
    }
    if (!(m >= 0.0) || !std::isfinite(m)) invalid_input("measure: masses must be finite and nonnegative");
    masses.emplace_back(std::move(idx), m);
  }
  return CellMeasure::from_masses(n, depth, masses);
}

std::string certificate_to_json(const SparsityCertificate& cert) {
  std::string out = "{\"n\": " + std::to_string(cert.dim()) + ", \"ell\": " + std::to_string(cert.ell()) + ", \"scales\": [";
  for (std::size_t j = 0; j < cert.scale_count(); ++j) {
    if (j) out += ", ";
    out += std::to_string(cert.scale(j));
  }
  out += "], \"families\": [";
  for (std::size_t j = 0; j < cert.scale_count(); ++j) {
    out += j ? ",\n" : "\n";
    out += "{\"scale\": " + std::to_string(j);
    if (cert.selection_count(j) > kExplicitListLimit) {
      out += ", \"dag\": " + tree_to_dag(cert.family(j)) + "}";
      continue;
    }
    out += ", \"pairs\": [";
    bool first = true;
    for (const auto& [q, qp] : cert.pairs(j, kExplicitListLimit)) {
      out += first ? "\n" : ",\n";
      first = false;
      out += '[';
      append_index(out, q);
      out += ',';
      append_index(out, qp);
      out += ']';
    }
    out += "]}";
  }
  return out + "]}\n";
}

SparsityCertificate certificate_from_json(const std::string& text) {
  const json j = parse(text, "certificate");
  const int ell = field<int>(j, "ell", "certificate");
  const auto scales = field<std::vector<int>>(j, "scales", "certificate");
  if (!j.contains("families") || !j["families"].is_array()) invalid_input("certificate: missing field 'families'");
  const json& fams = j["families"];
  int n = 0;
  if (j.contains("n")) {
    n = field<int>(j, "n", "certificate");
  } else {
    for (const json& f : fams) {
      if (f.contains("pairs") && !f["pairs"].empty()) {
        n = static_cast<int>(f["pairs"][0].at(0).size());
        break;
      }
    }
    if (n == 0) invalid_input("certificate: cannot infer the dimension; add field 'n'");
  }
  SparsityCertificate cert(n, ell);
  if (fams.size() != scales.size()) invalid_input("certificate: one family per scale required");
  for (std::size_t s = 0; s < scales.size(); ++s) {
    const json* fam = nullptr;
    for (const json& f : fams) {
      if (field<std::size_t>(f, "scale", "certificate") == s) fam = &f;
    }
    if (!fam) invalid_input("certificate: no family for scale " + std::to_string(s));
    if (fam->contains("dag")) {
      cert.add_scale(scales[s], tree_from_dag((*fam)["dag"], n, scales[s], "certificate"));
      continue;
    }
    if (!fam->contains("pairs") || !(*fam)["pairs"].is_array()) invalid_input("certificate: family without pairs");
    std::vector<std::pair<CubeIndex, CubeIndex>> pairs;
    for (const json& p : (*fam)["pairs"]) {
      if (!p.is_array() || p.size() != 2) invalid_input("certificate: pairs must be [Q, Q']");
      pairs.emplace_back(index_of(p[0], n, "certificate"), index_of(p[1], n, "certificate"));
    }
    cert.add_scale(scales[s], pairs);
  }
  return cert;
}

std::string cover_to_json(const CoverSolution& cover) {
  std::string out = "{\"cost\": " + format_double(cover.cost) + ", \"min_level\": " + std::to_string(cover.min_level) +
                    ", \"cover\": [";
  for (std::size_t i = 0; i < cover.cover.size(); ++i) {
    out += i ? ",\n" : "\n";
    out += "{\"level\": " + std::to_string(cover.cover[i].level()) + ", \"index\": ";
    append_index(out, cover.cover[i].index());
    out += '}';
  }
  return out + "]}\n";
}

std::string beta_profiles_to_csv(const std::vector<BetaProfile>& profiles) {
  std::size_t n = profiles.empty() ? 0 : profiles.front().center.size();
  std::string out = "point";
  for (std::size_t a = 0; a < n; ++a) out += ",x" + std::to_string(a);
  out += ",j,r,beta\n";
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const BetaProfile& pr = profiles[p];
    for (std::size_t i = 0; i < pr.levels.size(); ++i) {
      out += std::to_string(p);
      for (double c : pr.center) out += ',' + format_double(c);
      out += ',' + std::to_string(pr.levels[i]) + ',' + format_double(std::ldexp(1.0, -pr.levels[i])) + ',' +
             format_double(pr.betas[i]) + '\n';
    }
  }
  return out;
}

std::string beta_profiles_to_json(const std::vector<BetaProfile>& profiles, int k) {
  std::string out = "{\"k\": " + std::to_string(k) + ", \"profiles\": [";
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const BetaProfile& pr = profiles[p];
    out += p ? ",\n" : "\n";
    out += "{\"center\": [";
    for (std::size_t a = 0; a < pr.center.size(); ++a) out += (a ? "," : "") + format_double(pr.center[a]);
    out += "], \"levels\": [";
    for (std::size_t i = 0; i < pr.levels.size(); ++i) out += (i ? "," : "") + std::to_string(pr.levels[i]);
    out += "], \"betas\": [";
    for (std::size_t i = 0; i < pr.betas.size(); ++i) out += (i ? "," : "") + format_double(pr.betas[i]);
    out += "], \"square_function\": " + format_double(pr.square_function) + "}";
  }
  return out + "]}\n";
}

DomainPair domain_pair_from_json(const std::string& text) {
  const json j = parse(text, "domain pair");
  auto polys = [&](const char* key) {
    std::vector<std::vector<Point>> out;
    if (!j.contains(key)) return out;
    try {
      out = j[key].get<std::vector<std::vector<Point>>>();
    } catch (const json::exception& e) {
      invalid_input(std::string("domain pair: bad '") + key + "': " + e.what());
    }
    return out;
  };
  return polygon_pair(polys("plus"), polys("minus"));
}

}  // namespace gmt
