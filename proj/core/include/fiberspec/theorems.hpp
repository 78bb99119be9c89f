#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fiberspec/geometry.hpp"
#include "fiberspec/model_spectra.hpp"
#include "fiberspec/sector.hpp"

namespace fiberspec {

enum class BaseParity { Even, Odd };

struct BoundRow {
  int stage = 0;
  Sector k;
  int j = 0;           // -1 for stage-aggregate rows
  double lambda_sq = 0.0;
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

// Finite rendering of an asymptotic bound: epsilon and tolerance are the
// caller's slack, first_passing_stage the n0 from which every row passes.
struct BoundReport {
  std::string check;
  double tolerance = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  bool applicable = true;
  bool pass = false;
  std::optional<int> first_passing_stage;
  double worst_margin = 0.0;
  long failing_rows = 0;
  double bound_term_leading = 0.0;     // thm3: sqrt(1-2a)/(2 sup ell)
  double bound_term_zero_order = 0.0;  // thm3: clifford/4
  std::vector<BoundRow> rows;
  std::vector<std::string> notes;
};

// sup(ell_n)^2 lambda^2 >= |k|(|k|-alpha) - eps for k != 0 (integer lattice).
// Throws on a non-projectable table.
BoundReport check_thm1_lower(const SpectrumTable& table, const CollapseFamily& family,
                             double epsilon, double tolerance);

// (min ell_N)^2 lambda^2 <= |k|(|k|+alpha) + tolerance at the largest stage,
// k != 0, either lattice. Requires a family with fixed connection; throws
// otherwise.
BoundReport check_thm1_upper(const SpectrumTable& table, const CollapseFamily& family,
                             double tolerance);

// k = 0 eigenvalues converge to the base spectrum (even base dimension) or
// to the +- doubled base spectrum (odd base dimension); sup-distance per
// stage must be non-increasing and below tolerance at the final stage.
BoundReport check_thm1_convergence(const SpectrumTable& table, const EigenvalueList& base,
                                   BaseParity parity, double tolerance);

// Non-projectable version of the lower bound over k in Z+1/2, plus the
// divergence floor min |lambda| >= (sqrt(1/4 - alpha/2) - eps)/sup(ell_n).
// Throws if integer-k rows are present or alpha >= 1/2.
BoundReport check_thm2(const SpectrumTable& table, const CollapseFamily& family,
                       double epsilon, double tolerance);

// |lambda_i| >= sqrt(1 - 2*sup|grad ell|)/(2 sup ell) - clifford/4 for a
// non-projectable geometry; applied to enclosure lower edges when present.
// Reports applicable = false (and pass = false) when sup|grad ell| >= 1/2.
// Throws on a projectable geometry.
BoundReport check_thm3(const SpectrumTable& table, const BundleGeometry& geometry,
                       double tolerance);

}  // namespace fiberspec
