#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gmt {

using Point = std::vector<double>;
using CubeIndex = std::vector<std::int64_t>;

/// Deepest level whose indices and side lengths stay exact in int64/double.
inline constexpr int kMaxLevel = 62;

/// Half-open dyadic cube prod_i [index_i 2^-level, (index_i + 1) 2^-level)
/// inside [0,1)^n. Indices are canonical; geometry is derived on demand.
class DyadicCube {
 public:
  DyadicCube(int dim, int level, CubeIndex index);

  static DyadicCube root(int dim);

  int dim() const noexcept { return static_cast<int>(index_.size()); }
  int level() const noexcept { return level_; }
  const CubeIndex& index() const noexcept { return index_; }

  double side() const;
  double diameter() const;
  Point lower_corner() const;
  Point center() const;

  bool is_root() const noexcept { return level_ == 0; }
  DyadicCube parent() const;
  DyadicCube ancestor(int level) const;

  /// 2^n children in slot order: bit i of the slot is the offset along axis i,
  /// so for n = 2 the order is (0,0), (1,0), (0,1), (1,1).
  std::vector<DyadicCube> children() const;
  DyadicCube child(unsigned slot) const;

  /// All 2^(n*dlevel) cubes dlevel levels below, in lexicographic index order.
  std::vector<DyadicCube> descendants(int dlevel) const;

  bool contains(std::span<const double> point) const;
  bool contains(const DyadicCube& other) const;

  /// Euclidean distance from point to the closure of the cube.
  double distance_to(std::span<const double> point) const;

  std::string to_string() const;

  auto operator<=>(const DyadicCube&) const = default;

 private:
  int level_;
  CubeIndex index_;
};

/// The level-`level` cube containing `point`; point must lie in [0,1)^n.
DyadicCube cube_at(std::span<const double> point, int level);

inline double diameter(const DyadicCube& cube) { return cube.diameter(); }

/// sqrt(n) * 2^-level.
double cube_diameter(int dim, int level);

/// Side 2^-level, exact.
double cube_side(int level);

/// Distance from point to the closed box [lo, lo + side]^n.
double box_distance(std::span<const double> point, std::span<const double> lo, double side);

}  // namespace gmt
