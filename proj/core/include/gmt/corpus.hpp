#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmt/cell_set.hpp"
#include "gmt/sparsify.hpp"

namespace gmt {

enum class SetKind { kPlanePatch, kFourCornerCantor, kProductCantor, kRandomSparse, kRandomDense, kUnion };

struct GeneratorSpec {
  SetKind kind = SetKind::kPlanePatch;
  int dim = 2;
  int depth = 6;
  int k = 1;              // plane-patch: dimension of the patch (k = n gives the full cube)
  int ratio_log = 2;      // product-cantor: contraction 2^-ratio_log, digits {0, 2^ratio_log - 1}
  int ell = 4;            // random-sparse
  double density = 0.75;  // random-dense / random-sparse free levels: child keep probability
  std::uint64_t seed = 0;
  std::vector<GeneratorSpec> parts;  // union
};

struct GeneratedSet {
  CellSet set;
  std::optional<SparsityCertificate> certificate;  // random-sparse only
};

/// plane-patch: cells {x : x_i = 0 for i >= k}, i.e. [0,1)^k x {0} at depth m.
/// four-corner-cantor: product-cantor with ratio 1/4; one generation spans two
/// levels, so depth 2g holds 4^g cells (n = 2).
/// product-cantor: cells meeting prod_i C_a, C_a the Cantor set with digits
/// {0, 2^a - 1} in base 2^a; a truncated last generation keeps both halves.
/// random-sparse: scales l_1 = 1, l_(j+1) = l_j + ell + 1; each level-l_j cube
/// keeps one random level-(l_j + ell) subcube, other levels keep random
/// nonempty child subsets. Emits the certificate of the scales that fit.
/// random-dense: random nonempty child subsets at every level.
/// union: union of the parts, refined to the deepest part.
GeneratedSet generate(const GeneratorSpec& spec);

SetKind parse_set_kind(const std::string& name);
std::string set_kind_name(SetKind kind);

}  // namespace gmt
