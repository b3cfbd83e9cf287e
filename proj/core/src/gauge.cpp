#include "gmt/gauge.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gmt/error.hpp"
#include "gmt/lattice.hpp"

namespace gmt {

namespace {

// Repeated multiplication keeps h(2r) = 2^k h(r) exact.
double int_power(double x, int k) {
  double p = 1.0;
  for (int i = 0; i < k; ++i) p *= x;
  return p;
}

int parse_int(const std::string& s, const std::string& spec) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    invalid_input("bad gauge spec: " + spec);
  }
  if (used != s.size()) invalid_input("bad gauge spec: " + spec);
  return v;
}

}  // namespace

double unit_ball_volume(int k) {
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

Gauge::Gauge(std::function<double(double)> h, std::string label, std::optional<int> k_ref)
    : h_(std::move(h)), label_(std::move(label)), k_ref_(k_ref) {}

Gauge Gauge::scaled(double c) const {
  if (!(c > 0.0)) invalid_input("gauge scale factor must be positive");
  auto inner = h_;
  std::ostringstream label;
  label << c << "*" << label_;
  return Gauge([inner, c](double r) { return c * inner(r); }, label.str(), k_ref_);
}

Gauge power_gauge(int k) {
  if (k < 1) invalid_input("power gauge needs k >= 1");
  const double omega = unit_ball_volume(k);
  return Gauge([omega, k](double r) { return omega * int_power(0.5 * r, k); }, "power:" + std::to_string(k), k);
}

Gauge vanishing_gauge(int k) {
  if (k < 1) invalid_input("vanishing gauge needs k >= 1");
  return Gauge(
      [k](double r) {
        if (r <= 0.0) return 0.0;
        const double rk = std::pow(r, k);
        if (r > 1.0) return rk;  // r^k * g(1), g(1) = 1
        return rk / (1.0 - std::log(r));
      },
      "vanish:" + std::to_string(k), k);
}

Gauge power_excess_gauge(int k, double s) {
  if (k < 1) invalid_input("powerexp gauge needs k >= 1");
  if (!(s >= 0.0)) invalid_input("powerexp gauge needs s >= 0");
  std::ostringstream label;
  label << "powerexp:" << k << ":" << s;
  const double e = k + s;
  return Gauge([e](double r) { return r <= 0.0 ? 0.0 : std::pow(r, e); }, label.str(), k);
}

Gauge parse_gauge(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() == 2 && parts[0] == "power") return power_gauge(parse_int(parts[1], spec));
  if (parts.size() == 2 && parts[0] == "vanish") return vanishing_gauge(parse_int(parts[1], spec));
  if (parts.size() == 3 && parts[0] == "powerexp") {
    double s = 0.0;
    std::size_t used = 0;
    try {
      s = std::stod(parts[2], &used);
    } catch (const std::exception&) {
      invalid_input("bad gauge spec: " + spec);
    }
    if (used != parts[2].size()) invalid_input("bad gauge spec: " + spec);
    return power_excess_gauge(parse_int(parts[1], spec), s);
  }
  invalid_input("unknown gauge spec: " + spec + " (expected power:k, vanish:k or powerexp:k:s)");
}

void validate_gauge(const Gauge& h, int dim) {
  if (h(0.0) != 0.0) invalid_input("gauge " + h.label() + " has h(0) != 0");
  double previous = 0.0;
  for (int j = 40; j >= 0; --j) {
    const double v = h(cube_diameter(dim, j));
    if (!std::isfinite(v) || v < 0.0) invalid_input("gauge " + h.label() + " not finite/nonnegative on grid");
    if (v < previous) invalid_input("gauge " + h.label() + " decreases on the dyadic grid");
    previous = v;
  }
}

RatioReport ratio_vanishes(const Gauge& h, int k, int levels, int dim, double epsilon) {
  if (levels < 2) invalid_input("ratio_vanishes needs levels >= 2");
  RatioReport rep;
  rep.epsilon = epsilon;
  rep.ratios.reserve(static_cast<std::size_t>(levels) + 1);
  for (int j = 0; j <= levels; ++j) {
    const double d = cube_diameter(dim, j);
    rep.ratios.push_back(h(d) / std::pow(d, k));
  }
  rep.nonincreasing = true;
  for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
    if (rep.ratios[i] > rep.ratios[i - 1] * (1.0 + 1e-12)) rep.nonincreasing = false;
  }
  rep.below_epsilon = rep.ratios.back() < epsilon;
  rep.verdict = rep.nonincreasing && rep.below_epsilon;
  return rep;
}

}  // namespace gmt
