// gmt: command-line front end for the dyadic geometric measure theory toolkit.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gmt/beta.hpp"
#include "gmt/carleson.hpp"
#include "gmt/content.hpp"
#include "gmt/corpus.hpp"
#include "gmt/error.hpp"
#include "gmt/frostman.hpp"
#include "gmt/gauge.hpp"
#include "gmt/holes.hpp"
#include "gmt/io.hpp"
#include "gmt/pipeline.hpp"
#include "gmt/random.hpp"
#include "gmt/sparsify.hpp"

namespace {

using namespace gmt;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

Point parse_point(const std::string& s) {
  Point p;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      p.push_back(std::stod(item));
    } catch (const std::exception&) {
      invalid_input("bad coordinate '" + item + "' in point '" + s + "'");
    }
  }
  if (p.empty()) invalid_input("empty point");
  return p;
}

std::pair<int, int> parse_scales(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) invalid_input("scales must look like j_min:j_max");
  try {
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::exception&) {
    invalid_input("scales must look like j_min:j_max");
  }
}

struct GenerateArgs {
  std::string kind = "plane-patch";
  GeneratorSpec spec;
  std::vector<std::string> parts;
  std::string out;
  std::string certificate;
};

void add_generate_options(CLI::App* cmd, GenerateArgs& a) {
  cmd->add_option("--kind", a.kind, "plane-patch | four-corner-cantor | product-cantor | random-sparse | random-dense | union");
  cmd->add_option("--dim,-n", a.spec.dim, "ambient dimension");
  cmd->add_option("--depth,-m", a.spec.depth, "cell depth");
  cmd->add_option("--k", a.spec.k, "plane-patch dimension");
  cmd->add_option("--ratio", a.spec.ratio_log, "product-cantor contraction exponent a (ratio 2^-a)");
  cmd->add_option("--ell", a.spec.ell, "random-sparse parameter");
  cmd->add_option("--density", a.spec.density, "child keep probability for random kinds");
  cmd->add_option("--seed", a.spec.seed, "random seed");
  cmd->add_option("--part", a.parts, "union part kinds (share dim, depth and seed)");
  cmd->add_option("-o,--output", a.out, "set file (stdout if omitted)");
  cmd->add_option("--certificate", a.certificate, "random-sparse certificate file");
}

int run_generate(GenerateArgs& a) {
  a.spec.kind = parse_set_kind(a.kind);
  for (std::size_t i = 0; i < a.parts.size(); ++i) {
    GeneratorSpec p = a.spec;
    p.kind = parse_set_kind(a.parts[i]);
    p.parts.clear();
    p.seed = mix_seed(a.spec.seed, i);
    a.spec.parts.push_back(p);
  }
  const GeneratedSet g = generate(a.spec);
  emit(a.out, set_to_json(g.set));
  if (!a.certificate.empty()) {
    if (!g.certificate) invalid_input("only random-sparse emits a certificate");
    write_file(a.certificate, certificate_to_json(*g.certificate));
  }
  return 0;
}

void print_frostman(const FrostmanReport& r) {
  std::cerr << "gauge " << r.gauge_label << ": total mass " << format_double(r.total_mass) << ", max ratio "
            << format_double(r.max_ratio) << ", cubes checked " << format_double(r.cubes_checked) << ", "
            << (r.pass ? "pass" : "FAIL");
  if (r.worst_cube) std::cerr << ", worst cube " << r.worst_cube->to_string();
  std::cerr << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic geometric measure theory toolkit"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "random seed for every stage (default 0)");

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "generate a corpus set");
  add_generate_options(generate_cmd, gen);
  auto* corpus_cmd = app.add_subcommand("corpus", "corpus tools");
  corpus_cmd->require_subcommand(1);
  GenerateArgs gen2;
  auto* corpus_generate = corpus_cmd->add_subcommand("generate", "generate a corpus set");
  add_generate_options(corpus_generate, gen2);

  std::string set_path, measure_path, gauge_spec = "power:1", out, verify_path;
  auto* frostman_cmd = app.add_subcommand("frostman", "build or verify a Frostman measure");
  frostman_cmd->add_option("--set", set_path, "set file");
  frostman_cmd->add_option("--gauge", gauge_spec, "power:k | vanish:k | powerexp:k:s");
  frostman_cmd->add_option("--verify", verify_path, "verify this measure instead of building");
  frostman_cmd->add_option("-o,--output", out, "measure file (stdout if omitted)");

  int min_level = 0;
  bool profile = false;
  auto* content_cmd = app.add_subcommand("content", "optimal dyadic cover cost");
  content_cmd->add_option("--set", set_path, "set file")->required();
  content_cmd->add_option("--gauge", gauge_spec, "gauge spec");
  content_cmd->add_option("--min-level", min_level, "smallest allowed cube level");
  content_cmd->add_flag("--profile", profile, "print the cost for every min level");
  content_cmd->add_option("-o,--output", out, "cover file (stdout if omitted)");

  int k = 1;
  int ell = 0;
  std::string cert_path, check_set;
  auto* sparsify_cmd = app.add_subcommand("sparsify", "sparse measure and certificate, or check a certificate");
  sparsify_cmd->add_option("--measure", measure_path, "input measure file");
  sparsify_cmd->add_option("--gauge", gauge_spec, "gauge spec");
  sparsify_cmd->add_option("--k", k, "target dimension");
  sparsify_cmd->add_option("--ell", ell, "sparsity parameter (default: smallest provable)");
  sparsify_cmd->add_option("-o,--output", out, "sparse measure file");
  sparsify_cmd->add_option("--certificate", cert_path, "certificate file (written, or read with --check)");
  sparsify_cmd->add_option("--check", check_set, "set file to check against --certificate");

  std::string scales = "1:12", format = "csv", x_arg;
  std::size_t points = 8;
  auto* beta_cmd = app.add_subcommand("beta", "beta_2 square-function profiles");
  beta_cmd->add_option("--measure", measure_path, "measure file")->required();
  beta_cmd->add_option("--k", k, "plane dimension");
  beta_cmd->add_option("--scales", scales, "j_min:j_max");
  beta_cmd->add_option("--x", x_arg, "center x0,x1,... (default: sampled support points)");
  beta_cmd->add_option("--points", points, "number of sampled centers");
  beta_cmd->add_option("--format", format, "csv | json");
  beta_cmd->add_option("-o,--output", out, "profile file (stdout if omitted)");

  std::string pair_kind = "halfspace", polygon_path, normal_arg, eps_scales;
  int ambient = 2;
  double radius = 1.0, ball_radius = 0.5;
  std::size_t normals = 256, samples = 100000;
  auto* eps_cmd = app.add_subcommand("epsilon", "epsilon_n coefficient of a domain pair");
  eps_cmd->add_option("--pair", pair_kind, "halfspace | ball | empty | polygon");
  eps_cmd->add_option("--polygons", polygon_path, "polygon pair file");
  eps_cmd->add_option("--dim", ambient, "ambient dimension n + 1");
  eps_cmd->add_option("--x", x_arg, "center x0,x1,... (default origin)");
  eps_cmd->add_option("--normal", normal_arg, "halfspace normal (default last axis)");
  eps_cmd->add_option("--ball-radius", ball_radius, "radius of the ball pair");
  eps_cmd->add_option("--r", radius, "sphere radius");
  eps_cmd->add_option("--normals", normals, "coarse normal count");
  eps_cmd->add_option("--samples", samples, "sphere samples");
  eps_cmd->add_option("--scales", eps_scales, "j_min:j_max for a square-function profile");
  eps_cmd->add_option("--format", format, "csv | json");

  std::string gauge_opt;
  int depth = -1;
  std::size_t witness_samples = 100, c0_trials = 10000;
  auto* core_cmd = app.add_subcommand("extract-core", "full pipeline with report files");
  core_cmd->add_option("--set", set_path, "set file")->required();
  core_cmd->add_option("--k", k, "target dimension");
  core_cmd->add_option("--gauge", gauge_opt, "gauge spec (default powerexp:k:0.5)");
  core_cmd->add_option("--ell", ell, "sparsity parameter (default: smallest provable)");
  core_cmd->add_option("--depth", depth, "refine or coarsen the set to this depth");
  core_cmd->add_option("--witness-samples", witness_samples, "random (x, plane) witnesses");
  core_cmd->add_option("--c0-trials", c0_trials, "trials for the hole constant");
  core_cmd->add_option("-o,--output", out, "report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  const char* stage = "cli";
  try {
    if (*generate_cmd) return run_generate(gen);
    if (*corpus_generate) return run_generate(gen2);

    if (*frostman_cmd) {
      stage = "frostman";
      const Gauge h = parse_gauge(gauge_spec);
      if (!verify_path.empty()) {
        const CellMeasure mu = measure_from_json(read_file(verify_path));
        validate_gauge(h, mu.dim());
        const FrostmanReport r = verify_frostman(mu, h);
        print_frostman(r);
        if (!r.pass) {
          std::cerr << "verification failed [stage frostman]\n";
          return 2;
        }
        return 0;
      }
      if (set_path.empty()) invalid_input("frostman: need --set or --verify");
      const CellSet e = set_from_json(read_file(set_path));
      validate_gauge(h, e.dim());
      const CellMeasure mu = build_frostman(e, h);
      const FrostmanReport r = verify_frostman(mu, h);
      print_frostman(r);
      emit(out, measure_to_json(mu));
      return r.pass ? 0 : 2;
    }

    if (*content_cmd) {
      stage = "content";
      const Gauge h = parse_gauge(gauge_spec);
      const CellSet e = set_from_json(read_file(set_path));
      validate_gauge(h, e.dim());
      if (profile) {
        std::string text = "min_level,cost\n";
        const auto prof = measure_profile(e, h);
        for (std::size_t l = 0; l < prof.size(); ++l) text += std::to_string(l) + ',' + format_double(prof[l]) + '\n';
        emit(out, text);
        return 0;
      }
      emit(out, cover_to_json(dyadic_cover_cost(e, h, min_level)));
      return 0;
    }

    if (*sparsify_cmd) {
      stage = "sparsify";
      if (!check_set.empty()) {
        if (cert_path.empty()) invalid_input("sparsify --check needs --certificate");
        const CellSet e = set_from_json(read_file(check_set));
        const SparsityCertificate cert = certificate_from_json(read_file(cert_path));
        const bool ok = check_sparse(e, cert);
        std::cerr << "check_sparse: " << (ok ? "pass" : "FAIL") << "\n";
        return ok ? 0 : 2;
      }
      if (measure_path.empty()) invalid_input("sparsify: need --measure or --check");
      const CellMeasure mu = measure_from_json(read_file(measure_path));
      const Gauge h = parse_gauge(gauge_spec);
      validate_gauge(h, mu.dim());
      const int l = ell > 0 ? ell : min_sparsity_parameter(mu.dim(), k, k == 1 ? AlphaMode::kExactDiagonal : AlphaMode::kBallBound);
      const SparseResult res = build_sparse_measure(mu, h, k, l);
      const bool sparse_ok = check_sparse(res.measure.support(), res.certificate);
      const SparseCapReport caps = check_sparse_caps(res, h, k);
      std::cerr << "ell " << l << ", scales " << res.certificate.scale_count() << ", C0 "
                << format_double(res.rescale_constant) << ", check_sparse " << (sparse_ok ? "pass" : "FAIL")
                << ", caps " << (caps.pass ? "pass" : "FAIL") << "\n";
      emit(out, measure_to_json(res.measure));
      if (!cert_path.empty()) write_file(cert_path, certificate_to_json(res.certificate));
      return sparse_ok && caps.pass ? 0 : 2;
    }

    if (*beta_cmd) {
      stage = "beta";
      const auto [j_min, j_max] = parse_scales(scales);
      const CellMeasure mu = measure_from_json(read_file(measure_path));
      if (k < 1 || k > mu.dim()) invalid_input("beta: need 1 <= k <= n");
      const MeasureIndex index(mu);
      std::vector<Point> xs;
      if (!x_arg.empty()) {
        xs.push_back(parse_point(x_arg));
      } else if (!mu.zero()) {
        Rng rng(seed);
        const CellSet supp = mu.support();
        for (std::size_t i = 0; i < points; ++i) xs.push_back(supp.sample_cell(rng)->center());
      }
      std::vector<BetaProfile> profiles;
      for (const Point& x : xs) profiles.push_back(square_function(index, x, k, j_min, j_max));
      if (format == "csv") {
        emit(out, beta_profiles_to_csv(profiles));
      } else if (format == "json") {
        emit(out, beta_profiles_to_json(profiles, k));
      } else {
        invalid_input("format must be csv or json");
      }
      return 0;
    }

    if (*eps_cmd) {
      stage = "epsilon";
      Point x = x_arg.empty() ? Point(static_cast<std::size_t>(ambient), 0.0) : parse_point(x_arg);
      if (pair_kind == "polygon" && x_arg.empty()) x.assign(2, 0.0);
      DomainPair dp;
      if (pair_kind == "halfspace") {
        Point nu(x.size(), 0.0);
        nu.back() = 1.0;
        if (!normal_arg.empty()) nu = parse_point(normal_arg);
        dp = halfspace_pair(x, nu);
      } else if (pair_kind == "ball") {
        Point c = x;
        c.back() -= ball_radius;
        dp = ball_pair(c, ball_radius);
      } else if (pair_kind == "empty") {
        dp = empty_pair(static_cast<int>(x.size()));
      } else if (pair_kind == "polygon") {
        if (polygon_path.empty()) invalid_input("epsilon: polygon pair needs --polygons");
        dp = domain_pair_from_json(read_file(polygon_path));
      } else {
        invalid_input("unknown pair kind '" + pair_kind + "'");
      }
      if (eps_scales.empty()) {
        const EpsilonResult r = epsilon_n(dp, x, radius, normals, samples);
        std::string text = "{\"epsilon\": " + format_double(r.value) + ", \"coarse\": " + format_double(r.coarse) +
                           ", \"stages\": [";
        for (std::size_t i = 0; i < r.stages.size(); ++i) text += (i ? ", " : "") + format_double(r.stages[i]);
        text += "], \"normal\": [";
        for (std::size_t i = 0; i < r.normal.size(); ++i) text += (i ? ", " : "") + format_double(r.normal[i]);
        text += "]}\n";
        std::cout << text;
        return 0;
      }
      const auto [j_min, j_max] = parse_scales(eps_scales);
      const EpsilonProfile p = epsilon_square_function(dp, x, j_min, j_max, normals, samples);
      if (format == "json") {
        std::string text = "{\"levels\": [";
        for (std::size_t i = 0; i < p.levels.size(); ++i) text += (i ? ", " : "") + std::to_string(p.levels[i]);
        text += "], \"epsilon\": [";
        for (std::size_t i = 0; i < p.values.size(); ++i) text += (i ? ", " : "") + format_double(p.values[i]);
        text += "], \"square_function\": " + format_double(p.square_function) + "}\n";
        std::cout << text;
      } else {
        std::cout << "j,r,epsilon\n";
        for (std::size_t i = 0; i < p.levels.size(); ++i) {
          std::cout << p.levels[i] << ',' << format_double(std::ldexp(1.0, -p.levels[i])) << ','
                    << format_double(p.values[i]) << '\n';
        }
      }
      return 0;
    }

    if (*core_cmd) {
      stage = "extract-core";
      const CellSet e = set_from_json(read_file(set_path));
      PipelineOptions opt;
      opt.k = k;
      opt.gauge = gauge_opt;
      if (ell > 0) opt.ell = ell;
      if (depth >= 0) opt.depth = depth;
      opt.seed = seed;
      opt.witness_samples = witness_samples;
      opt.c0_trials = c0_trials;
      const Bundle b = extract_core(e, opt);
      const int code = write_report(b, out);
      if (code != 0) {
        const char* failed = !b.frostman_report.pass ? "frostman"
                             : !(b.sparse_check && b.caps.pass && b.coarse_pass) ? "sparsify"
                                                                                 : "witness";
        std::cerr << "verification failed [stage " << failed << "]\n";
      }
      return code;
    }
  } catch (const Error& e) {
    const std::string where = e.stage().empty() ? stage : e.stage();
    std::cerr << "error [stage " << where << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error [stage " << stage << "]: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
