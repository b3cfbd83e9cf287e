#include "gmt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "gmt/error.hpp"
#include "gmt/io.hpp"
#include "gmt/parallel.hpp"
#include "gmt/random.hpp"

namespace gmt {

namespace {

constexpr double kCoarseTolerance = 1e-12;

template <class F>
auto staged(const char* stage, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(stage);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kInvalidInput, e.what(), stage);
  }
}

// Centers of `count` cells sampled uniformly from the set.
std::vector<Point> sample_centers(const CellSet& set, std::size_t count, std::uint64_t seed) {
  std::vector<Point> out;
  if (set.empty()) return out;
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) out.push_back(set.sample_cell(rng)->center());
  return out;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  if (std::isnan(x)) return "\"nan\"";
  return format_double(x);
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out + "]";
}

std::string cube_json(const std::optional<DyadicCube>& c) {
  if (!c) return "null";
  std::string out = "{\"level\": " + std::to_string(c->level()) + ", \"index\": [";
  for (std::size_t i = 0; i < c->index().size(); ++i) out += (i ? "," : "") + std::to_string(c->index()[i]);
  return out + "]}";
}

}  // namespace

bool Bundle::pass() const {
  return frostman_report.pass && sparse_check && caps.pass && coarse_pass && witness.pass;
}

Bundle extract_core(const CellSet& input, const PipelineOptions& options) {
  if (input.empty()) throw Error(ErrorKind::kInvalidInput, "extract-core: empty set", "input");
  Bundle b;
  b.set = input;
  staged("input", [&] {
    if (options.depth) {
      const int d = *options.depth;
      if (d < 0 || d > kMaxLevel) invalid_input("depth out of range");
      if (d > input.depth()) b.set = input.refined(d);
      if (d < input.depth()) b.set = input.coarsened(d);
    }
    if (options.k < 1 || options.k >= b.set.dim()) invalid_input("need 1 <= k < n");
    return 0;
  });
  const CellSet& set = b.set;
  const int n = set.dim();
  const int k = options.k;
  b.k = k;

  const Gauge h = staged("gauge", [&] {
    const std::string spec = options.gauge.empty() ? "powerexp:" + std::to_string(k) + ":0.5" : options.gauge;
    Gauge g = parse_gauge(spec);
    validate_gauge(g, n);
    b.ell = options.ell ? *options.ell
                        : min_sparsity_parameter(n, k, k == 1 ? AlphaMode::kExactDiagonal : AlphaMode::kBallBound);
    if (b.ell < 1) invalid_input("ell must be positive");
    b.gauge_report = ratio_vanishes(g, k, set.depth(), n, std::ldexp(1.0, -n * b.ell));
    b.gauge_label = g.label();
    return g;
  });

  staged("frostman", [&] {
    b.frostman = build_frostman(set, h);
    b.frostman_report = verify_frostman(b.frostman, h);
    return 0;
  });

  staged("sparsify", [&] {
    SparseOptions so;
    so.keep_history = true;
    b.sparse = build_sparse_measure(b.frostman, h, k, b.ell, so);
    b.sparse_check = check_sparse(b.sparse.measure.support(), b.sparse.certificate);
    b.caps = check_sparse_caps(b.sparse, h, k);
    b.coarse_pass = true;
    for (std::size_t j = 0; j < b.sparse.certificate.scale_count(); ++j) {
      const int level = b.sparse.certificate.scale(j);
      const double dev = max_coarse_mass_deviation(b.sparse.history[j + 1], b.sparse.history[j], level);
      b.coarse.push_back(CoarseCheck{j, level, dev});
      b.coarse_pass = b.coarse_pass && dev <= kCoarseTolerance;
    }
    return 0;
  });

  staged("witness", [&] {
    b.c0 = estimate_c0(n, k, b.ell, options.c0_trials, options.hole_grid, mix_seed(options.seed, 1));
    b.witness = witness_unrectifiability(b.sparse.measure.support(), b.sparse.certificate, k, b.c0.c0,
                                         options.witness_samples, options.hole_grid, mix_seed(options.seed, 2));
    return 0;
  });

  staged("beta", [&] {
    const MeasureIndex index(b.sparse.measure);
    const std::vector<Point> xs = sample_centers(b.sparse.measure.support(), options.beta_points, mix_seed(options.seed, 3));
    b.profiles.resize(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
      b.profiles[i] = square_function(index, xs[i], k, options.beta_j_min, options.beta_j_max);
    });
    return 0;
  });

  staged("flatness", [&] {
    const std::vector<Point> xs = sample_centers(set, options.flatness_points, mix_seed(options.seed, 4));
    b.flatness.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      b.flatness[i] = content_beta(set, xs[i], options.flatness_radius, k, 32, 16, mix_seed(options.seed, 5 + i), 5).value;
    }
    b.flat_input = std::all_of(b.flatness.begin(), b.flatness.end(),
                               [&](double v) { return v < options.flatness_threshold; });
    return 0;
  });
  return b;
}

std::string summary_json(const Bundle& b) {
  const SparseResult& s = b.sparse;
  std::string out = "{\n";
  out += "\"n\": " + std::to_string(b.set.dim()) + ",\n";
  out += "\"depth\": " + std::to_string(b.set.depth()) + ",\n";
  out += "\"k\": " + std::to_string(b.k) + ",\n";
  out += "\"ell\": " + std::to_string(b.ell) + ",\n";
  out += "\"cells\": " + num(b.set.size()) + ",\n";
  out += "\"gauge\": {\"label\": \"" + b.gauge_label + "\", \"ratios\": " + list(b.gauge_report.ratios) +
         ", \"nonincreasing\": " + bool_str(b.gauge_report.nonincreasing) +
         ", \"epsilon\": " + num(b.gauge_report.epsilon) + ", \"vanishes\": " + bool_str(b.gauge_report.verdict) + "},\n";
  const FrostmanReport& f = b.frostman_report;
  out += "\"frostman\": {\"total_mass\": " + num(f.total_mass) + ", \"max_ratio\": " + num(f.max_ratio) +
         ", \"worst_cube\": " + cube_json(f.worst_cube) + ", \"saturated_cover_cost\": " + num(f.saturated_cover_cost) +
         ", \"cubes_checked\": " + num(f.cubes_checked) + ", \"pass\": " + bool_str(f.pass) + "},\n";
  std::string scales = "[";
  for (std::size_t j = 0; j < s.certificate.scale_count(); ++j) scales += (j ? ", " : "") + std::to_string(s.certificate.scale(j));
  scales += "]";
  std::string coarse = "[";
  for (std::size_t i = 0; i < b.coarse.size(); ++i) {
    coarse += (i ? ", " : "") + std::string("{\"scale\": ") + std::to_string(b.coarse[i].scale) +
              ", \"level\": " + std::to_string(b.coarse[i].level) + ", \"deviation\": " + num(b.coarse[i].deviation) + "}";
  }
  coarse += "]";
  out += "\"sparsify\": {\"scales\": " + scales + ", \"input_total\": " + num(s.input_total) +
         ", \"normalized\": " + bool_str(s.normalized) + ", \"mass_factor\": " + num(s.mass_factor) +
         ", \"gauge_constant\": " + num(s.gauge_constant) + ", \"rescale_constant\": " + num(s.rescale_constant) +
         ", \"check_sparse\": " + bool_str(b.sparse_check) + ", \"max_ratio_gauge\": " + num(b.caps.max_ratio_gauge) +
         ", \"max_ratio_rescaled\": " + num(b.caps.max_ratio_rescaled) + ", \"caps_pass\": " + bool_str(b.caps.pass) +
         ", \"coarse\": " + coarse + ", \"coarse_pass\": " + bool_str(b.coarse_pass) + "},\n";
  const WitnessReport& w = b.witness;
  out += "\"witness\": {\"c0\": " + num(b.c0.c0) + ", \"c0_trials\": " + std::to_string(b.c0.trials) +
         ", \"ell_threshold\": " + std::to_string(b.c0.ell_threshold) +
         ", \"below_threshold\": " + bool_str(b.c0.below_threshold) + ", \"samples\": " + std::to_string(w.samples) +
         ", \"checks\": " + std::to_string(w.checks) + ", \"per_scale_min\": " + list(w.per_scale_min) +
         ", \"min_relative_clearance\": " + num(w.min_relative_clearance) +
         ", \"failures\": " + std::to_string(w.failures.size()) + ", \"pass\": " + bool_str(w.pass) + "},\n";
  std::vector<double> sums;
  for (const BetaProfile& p : b.profiles) sums.push_back(p.square_function);
  out += "\"beta\": {\"points\": " + std::to_string(b.profiles.size()) + ", \"square_functions\": " + list(sums) + "},\n";
  out += "\"flatness\": {\"content_beta\": " + list(b.flatness) + ", \"flat_input\": " + bool_str(b.flat_input) + "},\n";
  out += "\"pass\": " + bool_str(b.pass()) + "\n}\n";
  return out;
}

int write_report(const Bundle& b, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir + ": " + ec.message(), "report");
  const std::filesystem::path p(dir);
  try {
    write_file((p / "summary.json").string(), summary_json(b));
    write_file((p / "beta.csv").string(), beta_profiles_to_csv(b.profiles));
    write_file((p / "certificate.json").string(), certificate_to_json(b.sparse.certificate));
    write_file((p / "set.json").string(), set_to_json(b.set));
    write_file((p / "frostman.json").string(), measure_to_json(b.frostman));
    write_file((p / "sparse.json").string(), measure_to_json(b.sparse.measure));
  } catch (const Error& e) {
    throw e.with_stage("report");
  }
  return b.pass() ? 0 : 2;
}

}  // namespace gmt
