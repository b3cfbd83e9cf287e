#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gmt {

/// Volume of the unit ball in R^k.
double unit_ball_volume(int k);

/// Continuous increasing h : [0, inf) -> [0, inf) with h(0) = 0, used as the
/// gauge of a generalized Hausdorff measure and as a Frostman cap.
class Gauge {
 public:
  Gauge(std::function<double(double)> h, std::string label, std::optional<int> k_ref = std::nullopt);

  double operator()(double r) const { return h_(r); }
  const std::string& label() const noexcept { return label_; }
  std::optional<int> k_ref() const noexcept { return k_ref_; }

  /// c * h, for c > 0.
  Gauge scaled(double c) const;

 private:
  std::function<double(double)> h_;
  std::string label_;
  std::optional<int> k_ref_;
};

/// omega_k (r/2)^k: the normalization under which H^h is Hausdorff measure.
Gauge power_gauge(int k);

/// r^k / log(e/r) on (0, 1], r^k beyond; h(r)/r^k -> 0 as r -> 0.
Gauge vanishing_gauge(int k);

/// r^(k+s).
Gauge power_excess_gauge(int k, double s);

/// Parses "power:k", "vanish:k" or "powerexp:k:s".
Gauge parse_gauge(const std::string& spec);

/// Throws kInvalidInput unless h(0) = 0, h is finite and nondecreasing on
/// {sqrt(n) 2^-j : 0 <= j <= 40}.
void validate_gauge(const Gauge& h, int dim);

struct RatioReport {
  std::vector<double> ratios;  // h(d_j) / d_j^k with d_j = sqrt(n) 2^-j, j = 0..levels
  bool nonincreasing = false;
  bool below_epsilon = false;
  bool verdict = false;  // nonincreasing and the last ratio < epsilon
  double epsilon = 0.0;
};

RatioReport ratio_vanishes(const Gauge& h, int k, int levels, int dim = 2, double epsilon = 0.05);

}  // namespace gmt
