#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gmt/lattice.hpp"

namespace gmt {

enum class Side { kNeither, kPlus, kMinus };

/// Two disjoint open sets in R^(n+1), given by a pure labeling oracle.
struct DomainPair {
  int ambient = 0;  // n + 1
  std::function<Side(std::span<const double>)> oracle;
  std::string label;

  Side operator()(std::span<const double> p) const { return oracle(p); }
};

/// {(y - p).nu > 0} and {(y - p).nu < 0}.
DomainPair halfspace_pair(std::span<const double> point, std::span<const double> normal);
/// Open ball and the complement of its closure.
DomainPair ball_pair(std::span<const double> center, double radius);
/// Both sets empty.
DomainPair empty_pair(int ambient);
/// Interiors of polygons in the plane (even-odd rule). Throws kInvalidInput
/// if a plus polygon meets a minus polygon.
DomainPair polygon_pair(const std::vector<std::vector<Point>>& plus, const std::vector<std::vector<Point>>& minus);
DomainPair custom_pair(int ambient, std::function<Side(std::span<const double>)> oracle, std::string label);

/// Quasi-uniform unit vectors in R^d: equal angles for d = 2, a spherical
/// Fibonacci lattice for d = 3, Halton points through the inverse normal CDF
/// for d >= 4.
std::vector<Point> sphere_points(int d, std::size_t count);
/// First `count` of a nested low-discrepancy sequence on S^(d-1): every
/// prefix of a longer call equals the shorter call.
std::vector<Point> normal_sequence(int d, std::size_t count);

struct EpsilonResult {
  double value = 0.0;           // best over coarse normals and both refinement rounds
  double coarse = 0.0;          // best over the coarse normals only
  std::vector<double> stages;   // best after each refinement round
  Point normal;                 // minimizing normal
  std::size_t samples = 0;
  std::size_t normals = 0;
};

/// r^-n inf over halfspaces H with x on the boundary of
/// sum over i = +,- of H^n(S_H^i minus Omega^i), S_H^+/- the two open
/// hemispheres of the sphere of radius r about x, estimated from
/// `sphere_samples` sphere points.
EpsilonResult epsilon_n(const DomainPair& dp, std::span<const double> x, double r, std::size_t normals,
                        std::size_t sphere_samples);

struct EpsilonProfile {
  Point center;
  std::vector<int> levels;
  std::vector<double> values;
  double square_function = 0.0;  // sum eps^2 ln 2
};

EpsilonProfile epsilon_square_function(const DomainPair& dp, std::span<const double> x, int j_min, int j_max,
                                       std::size_t normals, std::size_t sphere_samples);

}  // namespace gmt
