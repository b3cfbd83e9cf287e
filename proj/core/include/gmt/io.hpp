#pragma once

#include <string>
#include <vector>

#include "gmt/beta.hpp"
#include "gmt/carleson.hpp"
#include "gmt/cell_measure.hpp"
#include "gmt/cell_set.hpp"
#include "gmt/content.hpp"
#include "gmt/sparsify.hpp"

namespace gmt {

/// Lists with more entries than this are written as a shared-node "dag"
/// object instead of an explicit array.
inline constexpr double kExplicitListLimit = 1 << 20;

/// Decimal with 17 significant digits.
std::string format_double(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// {"n", "depth", "cells": [[i, ...], ...]} sorted lexicographically, or
/// {"n", "depth", "dag": {"root", "nodes": [[level, weight, [child or -1, ...]], ...]}}
/// with nodes numbered in DFS post-order (children before parents).
std::string set_to_json(const CellSet& set);
CellSet set_from_json(const std::string& text);

/// {"n", "depth", "masses": [[[i, ...], mass], ...]} sorted, or a dag.
std::string measure_to_json(const CellMeasure& mu);
CellMeasure measure_from_json(const std::string& text);

/// {"n", "ell", "scales": [...], "families": [{"scale": j, "pairs": [[Q, Q'], ...]} or {"scale": j, "dag": ...}]}.
std::string certificate_to_json(const SparsityCertificate& cert);
SparsityCertificate certificate_from_json(const std::string& text);

/// {"cost", "min_level", "cover": [{"level", "index"}, ...]}.
std::string cover_to_json(const CoverSolution& cover);

/// Rows "point,x0,..,x(n-1),j,r,beta".
std::string beta_profiles_to_csv(const std::vector<BetaProfile>& profiles);
std::string beta_profiles_to_json(const std::vector<BetaProfile>& profiles, int k);

/// {"plus": [[[x, y], ...], ...], "minus": [...]}.
DomainPair domain_pair_from_json(const std::string& text);

}  // namespace gmt
