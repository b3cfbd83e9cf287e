#include "gmt/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmt/error.hpp"

namespace gmt {

double cube_side(int level) { return std::ldexp(1.0, -level); }

double cube_diameter(int dim, int level) {
  return std::sqrt(static_cast<double>(dim)) * cube_side(level);
}

double box_distance(std::span<const double> point, std::span<const double> lo, double side) {
  double sum = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double hi = lo[i] + side;
    double d = 0.0;
    if (point[i] < lo[i]) {
      d = lo[i] - point[i];
    } else if (point[i] > hi) {
      d = point[i] - hi;
    }
    sum += d * d;
  }
  return std::sqrt(sum);
}

DyadicCube::DyadicCube(int dim, int level, CubeIndex index) : level_(level), index_(std::move(index)) {
  if (dim < 1) invalid_input("cube dimension must be >= 1");
  if (level < 0 || level > kMaxLevel) invalid_input("cube level out of range: " + std::to_string(level));
  if (static_cast<int>(index_.size()) != dim) invalid_input("cube index has wrong dimension");
  const std::int64_t limit = std::int64_t{1} << level;
  for (auto i : index_) {
    if (i < 0 || i >= limit) invalid_input("cube index out of range at level " + std::to_string(level));
  }
}

DyadicCube DyadicCube::root(int dim) { return DyadicCube(dim, 0, CubeIndex(static_cast<std::size_t>(dim), 0)); }

double DyadicCube::side() const { return cube_side(level_); }

double DyadicCube::diameter() const { return cube_diameter(dim(), level_); }

Point DyadicCube::lower_corner() const {
  Point p(index_.size());
  const double s = side();
  for (std::size_t i = 0; i < index_.size(); ++i) p[i] = static_cast<double>(index_[i]) * s;
  return p;
}

Point DyadicCube::center() const {
  Point p(index_.size());
  const double s = side();
  for (std::size_t i = 0; i < index_.size(); ++i) p[i] = (static_cast<double>(index_[i]) + 0.5) * s;
  return p;
}

DyadicCube DyadicCube::parent() const {
  if (level_ == 0) invalid_input("root cube has no parent");
  return ancestor(level_ - 1);
}

DyadicCube DyadicCube::ancestor(int level) const {
  if (level < 0 || level > level_) invalid_input("ancestor level out of range");
  CubeIndex idx(index_);
  for (auto& i : idx) i >>= (level_ - level);
  return DyadicCube(dim(), level, std::move(idx));
}

DyadicCube DyadicCube::child(unsigned slot) const {
  if (level_ >= kMaxLevel) invalid_input("cube already at maximal level");
  CubeIndex idx(index_);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = 2 * idx[i] + ((slot >> i) & 1u);
  return DyadicCube(dim(), level_ + 1, std::move(idx));
}

std::vector<DyadicCube> DyadicCube::children() const {
  const unsigned fanout = 1u << dim();
  std::vector<DyadicCube> out;
  out.reserve(fanout);
  for (unsigned s = 0; s < fanout; ++s) out.push_back(child(s));
  return out;
}

std::vector<DyadicCube> DyadicCube::descendants(int dlevel) const {
  if (dlevel < 0) invalid_input("descendant depth must be >= 0");
  if (level_ + dlevel > kMaxLevel) invalid_input("descendant level exceeds maximal level");
  if (static_cast<long long>(dim()) * dlevel > 40) budget_exhausted("too many descendants requested");
  const std::int64_t per_axis = std::int64_t{1} << dlevel;
  const std::size_t n = index_.size();
  std::vector<DyadicCube> out;
  CubeIndex offset(n, 0);
  const std::int64_t total = std::int64_t{1} << (dlevel * static_cast<int>(n));
  out.reserve(static_cast<std::size_t>(total));
  for (std::int64_t c = 0; c < total; ++c) {
    CubeIndex idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = index_[i] * per_axis + offset[i];
    out.emplace_back(dim(), level_ + dlevel, std::move(idx));
    // odometer with the last axis fastest gives lexicographic order
    for (std::size_t i = n; i-- > 0;) {
      if (++offset[i] < per_axis) break;
      offset[i] = 0;
    }
  }
  return out;
}

bool DyadicCube::contains(std::span<const double> point) const {
  if (point.size() != index_.size()) return false;
  const double scale = std::ldexp(1.0, level_);
  for (std::size_t i = 0; i < index_.size(); ++i) {
    const double scaled = point[i] * scale;
    if (!(scaled >= static_cast<double>(index_[i]) && scaled < static_cast<double>(index_[i] + 1))) return false;
  }
  return true;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.dim() != dim() || other.level_ < level_) return false;
  return other.ancestor(level_).index_ == index_;
}

double DyadicCube::distance_to(std::span<const double> point) const {
  const Point lo = lower_corner();
  return box_distance(point, lo, side());
}

std::string DyadicCube::to_string() const {
  std::ostringstream os;
  os << "L" << level_ << "(";
  for (std::size_t i = 0; i < index_.size(); ++i) os << (i ? "," : "") << index_[i];
  os << ")";
  return os.str();
}

DyadicCube cube_at(std::span<const double> point, int level) {
  if (point.empty()) invalid_input("point must have at least one coordinate");
  if (level < 0) invalid_input("level must be >= 0");
  if (level > kMaxLevel) invalid_input("level exceeds maximal level");
  CubeIndex idx(point.size());
  const double scale = std::ldexp(1.0, level);
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (!(point[i] >= 0.0 && point[i] < 1.0)) invalid_input("point outside [0,1)^n");
    idx[i] = static_cast<std::int64_t>(std::floor(point[i] * scale));
  }
  return DyadicCube(static_cast<int>(point.size()), level, std::move(idx));
}

}  // namespace gmt
