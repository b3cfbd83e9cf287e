#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmt/beta.hpp"
#include "gmt/cell_measure.hpp"
#include "gmt/cell_set.hpp"
#include "gmt/frostman.hpp"
#include "gmt/gauge.hpp"
#include "gmt/holes.hpp"
#include "gmt/sparsify.hpp"

namespace gmt {

struct PipelineOptions {
  int k = 1;
  std::string gauge;                // empty: "powerexp:k:0.5"
  std::optional<int> ell;           // empty: smallest provable ell
  std::optional<int> depth;         // refine or coarsen E first
  std::uint64_t seed = 0;
  std::size_t witness_samples = 100;
  std::size_t c0_trials = 10000;
  int hole_grid = 64;
  std::size_t beta_points = 8;
  int beta_j_min = 1;
  int beta_j_max = 12;
  std::size_t flatness_points = 2;
  double flatness_radius = 0.25;
  double flatness_threshold = 0.05;
};

struct CoarseCheck {
  std::size_t scale = 0;
  int level = 0;
  double deviation = 0.0;
};

struct Bundle {
  CellSet set{1, 0};
  int k = 1;
  int ell = 0;
  std::string gauge_label;
  RatioReport gauge_report;
  CellMeasure frostman{1, 0};
  FrostmanReport frostman_report;
  SparseResult sparse;
  bool sparse_check = false;
  SparseCapReport caps;
  std::vector<CoarseCheck> coarse;
  bool coarse_pass = false;
  C0Estimate c0;
  WitnessReport witness;
  std::vector<BetaProfile> profiles;
  std::vector<double> flatness;     // content beta of E at sampled points
  bool flat_input = false;          // every sampled value below the threshold

  bool pass() const;
};

/// Gauge check, Frostman construction and verification, iterated
/// sparsification with its checks, hole witnesses, beta profiles of the
/// sparse measure and content-beta flatness of E. Errors carry the stage.
Bundle extract_core(const CellSet& set, const PipelineOptions& options);

/// Writes summary.json, beta.csv, certificate.json, set.json, frostman.json
/// and sparse.json into `dir`. Returns 0 iff every stage check passed, else 2.
int write_report(const Bundle& bundle, const std::string& dir);

std::string summary_json(const Bundle& bundle);

}  // namespace gmt
