#include "fiberspec/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fiberspec {

namespace {

// Slack for the non-increasing sup-distance check, above the eigensolver
// noise floor but far below any meaningful tolerance.
constexpr double kMonotoneSlack = 1e-9;

void finalize(BoundReport& report) {
  report.worst_margin = std::numeric_limits<double>::infinity();
  report.failing_rows = 0;
  for (const auto& r : report.rows) {
    report.worst_margin = std::min(report.worst_margin, r.margin);
    if (!r.pass) ++report.failing_rows;
  }
  if (report.rows.empty()) report.worst_margin = 0.0;
}

// Earliest stage such that every row from that stage onward passes.
std::optional<int> first_passing_stage(const std::vector<BoundRow>& rows,
                                       const std::vector<int>& stages) {
  std::optional<int> n0;
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    bool all_pass = true;
    for (const auto& r : rows)
      if (r.stage == *it && !r.pass) all_pass = false;
    if (!all_pass) break;
    n0 = *it;
  }
  return n0;
}

const BundleGeometry& stage_geometry(const CollapseFamily& family, int label) {
  for (std::size_t i = 0; i < family.stages.size(); ++i) {
    const int l = family.stage_labels.empty() ? static_cast<int>(i) : family.stage_labels[i];
    if (l == label) return family.stages[i];
  }
  throw std::invalid_argument("theorems: spectrum table refers to a stage outside the family");
}

void require_lattice(const SpectrumTable& table, bool integer, const char* check) {
  for (const auto& r : table.rows) {
    if (r.k.is_integer() != integer) {
      std::ostringstream msg;
      msg << check << ": table has " << (integer ? "half-integer" : "integer")
          << " sectors; wrong theorem for this spin structure";
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

BoundReport check_thm1_lower(const SpectrumTable& table, const CollapseFamily& family,
                             double epsilon, double tolerance) {
  require_lattice(table, true, "check_thm1_lower");

  BoundReport report;
  report.check = "thm1_lower";
  report.tolerance = tolerance;
  report.epsilon = epsilon;
  report.alpha = collapse_alpha(family);

  std::map<int, double> sup_by_stage;
  for (const auto& row : table.rows) {
    if (row.k.twice == 0) continue;  // theorem restricted to k != 0
    auto it = sup_by_stage.find(row.stage);
    if (it == sup_by_stage.end()) {
      const double sup = profile_functionals(stage_geometry(family, row.stage).profile).sup;
      it = sup_by_stage.emplace(row.stage, sup).first;
    }
    const double lambda_sq = row.lambda * row.lambda;
    const double value = it->second * it->second * lambda_sq;
    const double kabs = std::fabs(row.k.value());
    const double bound = kabs * (kabs - report.alpha) - epsilon;
    const double margin = value - bound;
    report.rows.push_back(
        {row.stage, row.k, row.j, lambda_sq, value, bound, margin, margin >= -tolerance});
  }

  finalize(report);
  report.first_passing_stage = first_passing_stage(report.rows, table.stage_labels());
  report.pass = report.first_passing_stage.has_value() && !report.rows.empty();
  return report;
}

BoundReport check_thm1_upper(const SpectrumTable& table, const CollapseFamily& family,
                             double tolerance) {
  // Fixed bundle and connection across stages is the theorem's precondition.
  const auto& first = family.stages.front().connection;
  for (const auto& g : family.stages) {
    const auto& c = g.connection;
    bool same = c.holonomy == first.holonomy && c.euler_numbers == first.euler_numbers &&
                c.curvature.size() == first.curvature.size();
    for (std::size_t i = 0; same && i < c.curvature.size(); ++i)
      same = c.curvature[i].axis_a == first.curvature[i].axis_a &&
             c.curvature[i].axis_b == first.curvature[i].axis_b &&
             c.curvature[i].coefficient == first.curvature[i].coefficient;
    if (!same)
      throw std::invalid_argument(
          "check_thm1_upper: family connection varies across stages; limsup bound needs a fixed "
          "bundle");
  }

  BoundReport report;
  report.check = "thm1_upper";
  report.tolerance = tolerance;
  report.alpha = collapse_alpha(family);
  report.notes.push_back(
      "limsup approximated at the largest stage; the bound is not uniform in j and k");

  const auto stages = table.stage_labels();
  if (stages.empty()) throw std::invalid_argument("check_thm1_upper: empty spectrum table");
  const int last = stages.back();
  const double min_ell = profile_functionals(stage_geometry(family, last).profile).min;

  for (const auto& row : table.rows) {
    if (row.stage != last || row.k.twice == 0) continue;
    const double lambda_sq = row.lambda * row.lambda;
    const double value = min_ell * min_ell * lambda_sq;
    const double kabs = std::fabs(row.k.value());
    const double bound = kabs * (kabs + report.alpha);
    const double margin = bound - value;
    report.rows.push_back(
        {row.stage, row.k, row.j, lambda_sq, value, bound, margin, margin >= -tolerance});
  }

  finalize(report);
  report.pass = !report.rows.empty() && report.failing_rows == 0;
  if (report.pass) report.first_passing_stage = last;
  return report;
}

BoundReport check_thm1_convergence(const SpectrumTable& table, const EigenvalueList& base,
                                   BaseParity parity, double tolerance) {
  BoundReport report;
  report.check = "thm1_convergence";
  report.tolerance = tolerance;

  std::map<int, std::vector<double>> zero_sector;
  for (const auto& row : table.rows)
    if (row.k.twice == 0) zero_sector[row.stage].push_back(row.lambda);
  if (zero_sector.empty())
    throw std::invalid_argument("check_thm1_convergence: no k = 0 rows (sector range excludes 0)");

  // Both the target multiset (base with +- doubling for odd base dimension)
  // and every reduced-operator spectrum are symmetric about zero, so the
  // signed multisets agree iff the |lambda| multisets do. Comparing sorted
  // |lambda| lists keeps the sup-distance stable when the j_count selection
  // boundary splits a +- pair.
  std::vector<double> target;
  for (double mu : base.expanded()) {
    target.push_back(std::fabs(mu));
    if (parity == BaseParity::Odd) target.push_back(std::fabs(mu));
  }
  std::sort(target.begin(), target.end());

  double prev_dist = std::numeric_limits<double>::infinity();
  const int last_stage = zero_sector.rbegin()->first;
  for (const auto& [stage, lambdas] : zero_sector) {
    const std::size_t count = lambdas.size();
    if (target.size() < count)
      throw std::invalid_argument(
          "check_thm1_convergence: base cutoff yields fewer eigenvalues than the table; "
          "cutoff inconsistency");
    std::vector<double> got(count);
    for (std::size_t i = 0; i < count; ++i) got[i] = std::fabs(lambdas[i]);
    std::sort(got.begin(), got.end());
    double dist = 0.0;
    for (std::size_t i = 0; i < count; ++i) dist = std::max(dist, std::fabs(got[i] - target[i]));

    const bool monotone = dist <= prev_dist + kMonotoneSlack;
    const bool final_ok = (stage != last_stage) || dist <= tolerance;
    report.rows.push_back({stage, sector_integer(0), -1, 0.0, dist, tolerance, -dist,
                           monotone && final_ok});
    prev_dist = dist;
  }

  finalize(report);
  report.pass = report.failing_rows == 0;
  report.first_passing_stage = first_passing_stage(report.rows, table.stage_labels());
  return report;
}

BoundReport check_thm2(const SpectrumTable& table, const CollapseFamily& family, double epsilon,
                       double tolerance) {
  require_lattice(table, false, "check_thm2");

  BoundReport report;
  report.check = "thm2";
  report.tolerance = tolerance;
  report.epsilon = epsilon;
  report.alpha = collapse_alpha(family);
  if (!(report.alpha < 0.5))
    throw std::invalid_argument("check_thm2: requires alpha < 1/2");

  std::map<int, double> sup_by_stage;
  for (const auto& row : table.rows) {
    auto it = sup_by_stage.find(row.stage);
    if (it == sup_by_stage.end()) {
      const double sup = profile_functionals(stage_geometry(family, row.stage).profile).sup;
      it = sup_by_stage.emplace(row.stage, sup).first;
    }
    const double lambda_sq = row.lambda * row.lambda;
    const double value = it->second * it->second * lambda_sq;
    const double kabs = std::fabs(row.k.value());
    const double bound = kabs * (kabs - report.alpha) - epsilon;
    const double margin = value - bound;
    report.rows.push_back(
        {row.stage, row.k, row.j, lambda_sq, value, bound, margin, margin >= -tolerance});
  }

  // Divergence floor per stage: min |lambda| >= (sqrt(1/4 - alpha/2) - eps)/sup(ell).
  const double floor_num =
      std::max(0.0, std::sqrt(std::max(0.0, 0.25 - report.alpha / 2.0)) - epsilon);
  for (int stage : table.stage_labels()) {
    const double sup = sup_by_stage.at(stage);
    const double floor = floor_num / sup;
    const double min_abs = table.min_abs_lambda(stage);
    const double margin = min_abs - floor;
    report.rows.push_back({stage, sector_twice(1), -1, min_abs * min_abs, min_abs, floor, margin,
                           margin >= -tolerance});
  }

  finalize(report);
  report.first_passing_stage = first_passing_stage(report.rows, table.stage_labels());
  report.pass = report.first_passing_stage.has_value() && !report.rows.empty();
  return report;
}

BoundReport check_thm3(const SpectrumTable& table, const BundleGeometry& geometry,
                       double tolerance) {
  if (geometry.spin.fiber_projectable)
    throw std::invalid_argument("check_thm3: requires a non-projectable spin structure");
  require_lattice(table, false, "check_thm3");

  BoundReport report;
  report.check = "thm3";
  report.tolerance = tolerance;

  const ProfileFunctionals f = profile_functionals(geometry.profile);
  report.alpha = f.grad_sup;
  if (!(f.grad_sup < 0.5)) {
    report.applicable = false;
    report.pass = false;
    report.notes.push_back("inapplicable: sup|grad ell| >= 1/2, the bound is vacuous");
    return report;
  }

  const double clifford = clifford_norm(geometry.connection, geometry.profile);
  report.bound_term_leading = std::sqrt(1.0 - 2.0 * f.grad_sup) / (2.0 * f.sup);
  report.bound_term_zero_order = clifford / 4.0;
  const double bound = report.bound_term_leading - report.bound_term_zero_order;

  for (const auto& row : table.rows) {
    const double edge = std::fabs(row.lambda) - row.enclosure_radius;
    const double margin = edge - bound;
    report.rows.push_back({row.stage, row.k, row.j, row.lambda * row.lambda, edge, bound, margin,
                           margin >= -tolerance});
  }

  finalize(report);
  report.pass = !report.rows.empty() && report.failing_rows == 0;
  if (report.pass && !table.rows.empty()) report.first_passing_stage = table.rows.front().stage;
  return report;
}

}  // namespace fiberspec
