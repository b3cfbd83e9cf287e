// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gmt/beta.hpp"
#include "gmt/carleson.hpp"
#include "gmt/content.hpp"
#include "gmt/corpus.hpp"
#include "gmt/frostman.hpp"
#include "gmt/gauge.hpp"
#include "gmt/holes.hpp"
#include "gmt/io.hpp"
#include "gmt/pipeline.hpp"
#include "gmt/sparsify.hpp"

using namespace gmt;

namespace {

constexpr double kDualityTolerance = 1e-9;
constexpr double kCapTolerance = 1e-9;
constexpr double kDualityBudgetSeconds = 60.0;
constexpr double kCoarseTolerance = 1e-12;
constexpr double kCircleTolerance = 0.02;
constexpr double kFlatBeta = 1e-12;
constexpr double kFlatSquareSum = 1e-10;
// least-squares slope of the partial beta^2 sums in j on four-corner Cantor;
// measured over 8 centers at depth 24: 0.043 to 0.060; pinned near half the minimum
constexpr double kCantorSlopeThreshold = 0.02;
constexpr double kHalfspaceEpsilon = 1e-3;
constexpr double kEmptyTolerance = 0.01;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %d [%s] %s: %s\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class... T>
std::string fmt(const char* f, T... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

GeneratorSpec spec_of(SetKind kind, int dim, int depth, std::uint64_t seed = 0) {
  GeneratorSpec s;
  s.kind = kind;
  s.dim = dim;
  s.depth = depth;
  s.seed = seed;
  return s;
}

std::vector<GeneratorSpec> duality_corpus() {
  std::vector<GeneratorSpec> out;
  // 10 plane patches
  for (int depth : {4, 8, 16, 24, 40}) {
    GeneratorSpec s = spec_of(SetKind::kPlanePatch, 2, depth);
    s.k = 1;
    out.push_back(s);
  }
  for (int depth : {4, 10, 20}) {
    GeneratorSpec s = spec_of(SetKind::kPlanePatch, 3, depth);
    s.k = depth == 20 ? 1 : 2;
    out.push_back(s);
  }
  {
    GeneratorSpec s = spec_of(SetKind::kPlanePatch, 2, 12);
    s.k = 2;
    out.push_back(s);
    s = spec_of(SetKind::kPlanePatch, 4, 6);
    s.k = 3;
    out.push_back(s);
  }
  // 10 four-corner Cantor sets, depth 1..10
  for (int depth = 1; depth <= 10; ++depth) out.push_back(spec_of(SetKind::kFourCornerCantor, 2, depth));
  // 15 random sparse
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    GeneratorSpec s = spec_of(SetKind::kRandomSparse, 2 + static_cast<int>(seed % 2), 10 + static_cast<int>(seed % 6), seed);
    s.ell = 2 + static_cast<int>(seed % 3);
    s.density = 0.4 + 0.04 * static_cast<double>(seed);
    out.push_back(s);
  }
  // 15 random dense
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const int dim = 2 + static_cast<int>(seed % 2);
    GeneratorSpec s = spec_of(SetKind::kRandomDense, dim, dim == 2 ? 6 + static_cast<int>(seed % 4) : 4 + static_cast<int>(seed % 3),
                              100 + seed);
    s.density = 0.3 + 0.045 * static_cast<double>(seed);
    out.push_back(s);
  }
  return out;
}

void criteria_1_2() {
  const auto corpus = duality_corpus();
  const std::vector<std::string> gauges{"power:1", "power:2", "vanish:1"};
  const auto start = std::chrono::steady_clock::now();
  double worst_gap = 0.0;
  double worst_ratio = 0.0;
  std::size_t runs = 0;
  std::size_t cap_failures = 0;
  std::string worst_case;
  for (const GeneratorSpec& spec : corpus) {
    const CellSet set = generate(spec).set;
    for (const std::string& g : gauges) {
      const Gauge h = parse_gauge(g);
      const CellMeasure mu = build_frostman(set, h);
      const double cover = dyadic_cover_value(set, h, 0);
      const double gap = std::abs(mu.total() - cover) / std::max(std::abs(cover), 1e-300);
      if (gap > worst_gap) {
        worst_gap = gap;
        worst_case = set_kind_name(spec.kind) + " depth " + std::to_string(spec.depth) + " " + g;
      }
      const FrostmanReport rep = verify_frostman(mu, h);
      worst_ratio = std::max(worst_ratio, rep.max_ratio);
      if (!(rep.pass && rep.max_ratio <= 1.0 + kCapTolerance)) ++cap_failures;
      ++runs;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(1, "Frostman-content duality", corpus.size() == 50 && worst_gap <= kDualityTolerance && seconds < kDualityBudgetSeconds,
         fmt("%zu sets x 3 gauges, max relative gap %.3g (%s), %.2f s", corpus.size(), worst_gap,
             worst_case.empty() ? "exact" : worst_case.c_str(), seconds));
  report(2, "Frostman cap", cap_failures == 0 && runs == 150,
         fmt("%zu constructions verified exhaustively, max mu(Q)/h(diam Q) = %.17g, %zu failures", runs, worst_ratio, cap_failures));
}

void criterion_3() {
  const int a = min_sparsity_parameter(2, 1, AlphaMode::kExactDiagonal);
  const int b = min_sparsity_parameter(3, 1, AlphaMode::kExactDiagonal);
  report(3, "sparsity parameter", a == 4 && b == 6, fmt("ell(n=2, k=1) = %d, ell(n=3, k=1) = %d", a, b));
}

struct SquareSparse {
  SparseResult result;
  Gauge h = power_excess_gauge(1, 0.5);
};

SquareSparse criterion_4() {
  SquareSparse out;
  const CellSet square = CellSet::full_cube(2, 40, DyadicCube::root(2));
  SparseOptions opt;
  opt.keep_history = true;
  out.result = build_sparse_measure(build_frostman(square, out.h), out.h, 1, 4, opt);
  const SparseResult& r = out.result;
  const bool has_scale = r.certificate.scale_count() >= 1;
  const int l1 = has_scale ? r.certificate.scale(0) : -1;
  const bool sparse = check_sparse(r.measure.support(), r.certificate);
  double coarse = 0.0;
  for (std::size_t j = 0; j < r.certificate.scale_count(); ++j) {
    coarse = std::max(coarse, max_coarse_mass_deviation(r.history[j + 1], r.history[j], r.certificate.scale(j)));
  }
  const SparseCapReport caps = check_sparse_caps(r, out.h, 1);
  // nu / C0 <= (diam Q)^k on every cube meeting the support
  const bool cap = caps.pass && caps.max_ratio_rescaled <= 1.0 + kCapTolerance;
  report(4, "sparse construction", l1 == 17 && sparse && coarse <= kCoarseTolerance && cap,
         fmt("l1 = %d, scales %zu, check_sparse %s, coarse deviation %.3g, max nu(Q)/(C0 diam^k) = %.6f with C0 = %.6f", l1,
             r.certificate.scale_count(), sparse ? "pass" : "fail", coarse, caps.max_ratio_rescaled, r.rescale_constant));
  return out;
}

void criterion_5(const SquareSparse& square) {
  const C0Estimate c0 = estimate_c0(2, 1, 4, 10000, 64, 1);
  const WitnessReport a =
      witness_unrectifiability(square.result.measure.support(), square.result.certificate, 1, c0.c0, 100, 64, 2);

  GeneratorSpec spec = spec_of(SetKind::kFourCornerCantor, 2, 40);
  const CellSet cantor = generate(spec).set;
  const SparseResult cs = build_sparse_measure(build_frostman(cantor, square.h), square.h, 1, 4);
  const WitnessReport b = witness_unrectifiability(cs.measure.support(), cs.certificate, 1, c0.c0, 100, 64, 3);

  const bool pass = c0.c0 > 0.0 && a.sparse && b.sparse && a.pass && b.pass && a.failures.empty() && b.failures.empty() &&
                    a.checks == 100 * square.result.certificate.scale_count() && b.checks == 100 * cs.certificate.scale_count() &&
                    cs.certificate.scale_count() >= 1;
  report(5, "hole witnesses", pass,
         fmt("c0 = %.6f (10^4 trials); square: %zu checks, min clearance %.4f, %zu failures; "
             "Cantor: %zu checks, min clearance %.4f, %zu failures",
             c0.c0, a.checks, a.min_relative_clearance, a.failures.size(), b.checks, b.min_relative_clearance,
             b.failures.size()));
}

void criterion_6() {
  const Point origin{0.0, 0.0};
  const double circle = beta2(circle_cloud(100000, origin, 1.0), origin, 1.0, 1);
  const double rel = std::abs(circle - std::sqrt(std::numbers::pi)) / std::sqrt(std::numbers::pi);

  double flat = 0.0;
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}}) {
    GeneratorSpec s = spec_of(SetKind::kPlanePatch, n, 24);
    s.k = k;
    const CellSet set = generate(s).set;
    const CellMeasure measure = build_frostman(set, power_gauge(k));
    const MeasureIndex index(measure);
    Rng rng(static_cast<std::uint64_t>(10 * n + k));
    for (int t = 0; t < 10; ++t) {
      const Point x = set.sample_cell(rng)->center();
      for (int j = 0; j <= 20; ++j) flat = std::max(flat, beta2(index, x, std::ldexp(1.0, -j), k));
    }
  }

  Rng rng(6);
  int violations = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + t % 2;
    const int k = 1 + (t / 2) % (n - 1);
    PointCloud c;
    c.dim = n;
    for (int p = 0; p < 40; ++p) {
      Point q(static_cast<std::size_t>(n));
      for (double& v : q) v = rng.uniform();
      c.points.push_back(q);
      c.weights.push_back(rng.uniform(0.1, 1.0));
    }
    Point x(static_cast<std::size_t>(n));
    for (double& v : x) v = rng.uniform();
    const double r = rng.uniform(0.05, 0.5);
    const double small = beta2(c, x, r, k);
    const double big = beta2(c, x, 2.0 * r, k);
    const double bound = std::pow(2.0, 0.5 * (k + 2)) * big;
    if (small > bound * (1.0 + 1e-9) + 1e-15) ++violations;
    if (bound > 0.0) worst = std::max(worst, small / bound);
  }
  report(6, "beta analytics", rel <= kCircleTolerance && flat < kFlatBeta && violations == 0,
         fmt("circle beta = %.6f vs sqrt(pi) = %.6f (rel %.2g); plane-patch max beta %.3g; doubling: 1000 instances, "
             "%d violations, max ratio %.4f",
             circle, std::sqrt(std::numbers::pi), rel, flat, violations, worst));
}

double partial_sum_slope(const BetaProfile& p) {
  // least squares of S(J) = sum_{j <= J} beta_j^2 ln 2 against J
  std::vector<double> xs, ys;
  double s = 0.0;
  for (std::size_t i = 0; i < p.betas.size(); ++i) {
    s += p.betas[i] * p.betas[i] * std::numbers::ln2;
    xs.push_back(p.levels[i]);
    ys.push_back(s);
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

void criterion_7() {
  double flat = 0.0;
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}}) {
    GeneratorSpec s = spec_of(SetKind::kPlanePatch, n, 24);
    s.k = k;
    const CellSet set = generate(s).set;
    const CellMeasure measure = build_frostman(set, power_gauge(k));
    const MeasureIndex index(measure);
    Rng rng(static_cast<std::uint64_t>(n));
    for (int t = 0; t < 8; ++t) flat = std::max(flat, square_function(index, set.sample_cell(rng)->center(), k, 2, 12).square_function);
  }
  const CellSet cantor = generate(spec_of(SetKind::kFourCornerCantor, 2, 24)).set;
  const CellMeasure measure = build_frostman(cantor, power_gauge(1));
  const MeasureIndex index(measure);
  Rng rng(7);
  double min_slope = INFINITY, max_slope = 0.0;
  for (int t = 0; t < 8; ++t) {
    const double slope = partial_sum_slope(square_function(index, cantor.sample_cell(rng)->center(), 1, 2, 12));
    min_slope = std::min(min_slope, slope);
    max_slope = std::max(max_slope, slope);
  }
  report(7, "square-function dichotomy", flat < kFlatSquareSum && min_slope > kCantorSlopeThreshold,
         fmt("plane patches: max sum %.3g over j = 2..12; four-corner Cantor: slope in [%.4f, %.4f] over 8 centers "
             "(threshold %.3f)",
             flat, min_slope, max_slope, kCantorSlopeThreshold));
}

void criterion_8() {
  Rng rng(8);
  double half = 0.0;
  for (int t = 0; t < 5; ++t) {
    const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Point x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    half = std::max(half, epsilon_n(halfspace_pair(x, Point{std::cos(th), std::sin(th)}), x, 0.5, 256, 100000).value);
  }
  const Point origin{0.0, 0.0};
  const double empty = epsilon_n(empty_pair(2), origin, 1.0, 256, 100000).value;
  const double empty_rel = std::abs(empty - 2.0 * std::numbers::pi) / (2.0 * std::numbers::pi);

  // nested normal sets and refinement rounds on one shared sample set
  bool monotone = true;
  const DomainPair ball = ball_pair(Point{0.0, -1.0}, 1.0);
  const DomainPair wedge = polygon_pair({{{0, 0}, {1, 0.2}, {1, 1}, {-1, 1}, {-1, 0.3}}}, {{{0, 0}, {-1, -0.1}, {0.2, -1}}});
  for (const DomainPair* dp : {&ball, &wedge}) {
    double previous = INFINITY;
    for (std::size_t normals = 1; normals <= 512; normals *= 2) {
      const EpsilonResult e = epsilon_n(*dp, origin, 0.5, normals, 100000);
      monotone = monotone && e.coarse <= previous && !e.stages.empty() && e.stages[0] <= e.coarse &&
                 e.value == e.stages.back();
      for (std::size_t i = 1; i < e.stages.size(); ++i) monotone = monotone && e.stages[i] <= e.stages[i - 1];
      previous = e.coarse;
    }
  }
  report(8, "epsilon_n", half < kHalfspaceEpsilon && empty_rel <= kEmptyTolerance && monotone,
         fmt("halfspace max %.3g over 5 random pairs; empty pair %.6f vs 2 pi (rel %.2g); refinement monotone: %s", half,
             empty, empty_rel, monotone ? "yes" : "no"));
}

void criterion_9() {
  const CellSet cantor = generate(spec_of(SetKind::kFourCornerCantor, 2, 28)).set;
  PipelineOptions o;
  o.seed = 9;
  const auto root = std::filesystem::temp_directory_path() / "gmt_acceptance_rerun";
  std::filesystem::remove_all(root);
  int code_a = write_report(extract_core(cantor, o), (root / "a").string());
  int code_b = write_report(extract_core(cantor, o), (root / "b").string());
  bool same = code_a == code_b;
  std::size_t bytes = 0;
  for (const char* f : {"summary.json", "beta.csv", "certificate.json", "set.json", "frostman.json", "sparse.json"}) {
    const std::string a = read_file((root / "a" / f).string());
    const std::string b = read_file((root / "b" / f).string());
    same = same && a == b && !a.empty();
    bytes += a.size();
  }
  std::filesystem::remove_all(root);
  report(9, "determinism", same, fmt("6 artifacts, %zu bytes, byte-identical: %s (exit codes %d, %d)", bytes,
                                     same ? "yes" : "no", code_a, code_b));
}

}  // namespace

int main() {
  auto guarded = [](int id, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      report(id, "exception", false, e.what());
    }
  };
  guarded(1, criteria_1_2);
  guarded(3, criterion_3);
  SquareSparse square;
  bool have_square = false;
  guarded(4, [&] {
    square = criterion_4();
    have_square = true;
  });
  if (have_square) {
    guarded(5, [&] { criterion_5(square); });
  } else {
    report(5, "hole witnesses", false, "no sparse output from criterion 4");
  }
  guarded(6, criterion_6);
  guarded(7, criterion_7);
  guarded(8, criterion_8);
  guarded(9, criterion_9);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
