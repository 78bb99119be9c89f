#include "fiberspec/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <sstream>
#include <stdexcept>

#include "fiberspec/model_spectra.hpp"

namespace fiberspec {

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int thread_count() {
  const char* env = std::getenv("FIBERSPEC_THREADS");
  if (!env) return 1;
  const long n = std::strtol(env, nullptr, 10);
  if (n < 1) return 1;
  return static_cast<int>(std::min<long>(n, 64));
}

bool has_check(const ExperimentConfig& c, CheckKind k) {
  return std::find(c.checks.begin(), c.checks.end(), k) != c.checks.end();
}

// Base spectrum for the k = 0 convergence target, grown until it covers the
// requested row count.
EigenvalueList convergence_base(const ExperimentConfig& config, const BundleGeometry& g,
                                int j_count) {
  const long need = (g.base_dimension() == 1) ? (j_count + 3) / 2 + 1 : j_count + 1;
  double cutoff = 8.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    EigenvalueList base =
        (g.base_dimension() == 1)
            ? circle_dirac_spectrum(g.base_circumference(), g.spin.base_twists[0], cutoff)
            : flat_torus_spectrum({config.torus_x, config.torus_y}, g.spin.base_twists, cutoff);
    if (base.total_multiplicity() >= need) return base;
    cutoff *= 2.0;
  }
  throw std::runtime_error("convergence check: base spectrum cutoff growth exhausted");
}

BoundReport thm3_over_stages(const SpectrumTable& table, const CollapseFamily& family,
                             double tolerance) {
  BoundReport merged;
  merged.check = "thm3";
  merged.tolerance = tolerance;
  merged.applicable = true;
  bool all_pass = true;
  for (std::size_t i = 0; i < family.stages.size(); ++i) {
    const int label = family.stage_labels[i];
    SpectrumTable sub;
    sub.meta = table.meta;
    sub.has_enclosures = table.has_enclosures;
    for (const auto& r : table.rows)
      if (r.stage == label) sub.rows.push_back(r);
    BoundReport stage_report = check_thm3(sub, family.stages[i], tolerance);
    merged.alpha = stage_report.alpha;
    merged.bound_term_leading = stage_report.bound_term_leading;
    merged.bound_term_zero_order = stage_report.bound_term_zero_order;
    merged.applicable = merged.applicable && stage_report.applicable;
    all_pass = all_pass && stage_report.pass;
    merged.rows.insert(merged.rows.end(), stage_report.rows.begin(), stage_report.rows.end());
    for (const auto& note : stage_report.notes) merged.notes.push_back(note);
  }
  merged.pass = merged.applicable && all_pass && !merged.rows.empty();
  merged.worst_margin = 0.0;
  merged.failing_rows = 0;
  bool first = true;
  for (const auto& r : merged.rows) {
    if (first || r.margin < merged.worst_margin) merged.worst_margin = r.margin;
    first = false;
    if (!r.pass) ++merged.failing_rows;
  }
  if (merged.pass) merged.first_passing_stage = family.stage_labels.front();
  return merged;
}

}  // namespace

bool ExperimentResult::all_checks_pass() const {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

ExperimentResult run_collapse_experiment(const ExperimentConfig& config) {
  const CollapseFamily family = make_family(config);
  const SectorLattice lattice =
      config.projectable ? SectorLattice::Integers : SectorLattice::HalfIntegers;

  const bool asymptotic = has_check(config, CheckKind::Thm1Lower) ||
                          has_check(config, CheckKind::Thm1Upper) ||
                          has_check(config, CheckKind::Thm1Convergence) ||
                          has_check(config, CheckKind::Thm2);

  double alpha = collapse_alpha(family);
  std::vector<double> sup_series;
  for (const auto& g : family.stages) sup_series.push_back(profile_functionals(g.profile).sup);

  if (asymptotic) {
    const CollapseReport collapse = validate_collapse_family(family, lattice);
    alpha = collapse.alpha;
    if (!collapse.ok) {
      std::ostringstream msg;
      msg << "collapse validation failed before solving:";
      for (const auto& d : collapse.diagnostics) msg << "\n  " << d;
      throw std::invalid_argument(msg.str());
    }
  }

  // Per-stage spectra, optionally parallel over stages.
  const int threads = thread_count();
  std::vector<SpectrumTable> stage_tables(family.stages.size());
  auto solve_stage = [&](std::size_t i) {
    const int label = family.stage_labels[i];
    const double cutoff_hint = config.solver.cutoff_auto ? 0.0 : config.solver.cutoff;
    SpectrumTable t =
        assemble_spectrum(family.stages[i], config.solver.k_lo, config.solver.k_hi,
                          config.solver.j_count, stage_grid(config, label), label,
                          AssembleRoute::Auto, cutoff_hint);
    if (config.type == GeometryType::FluxBundle) {
      const double cl = clifford_norm(family.stages[i].connection, family.stages[i].profile);
      t = zero_order_enclosure(t, cl);
    }
    stage_tables[i] = std::move(t);
  };
  if (threads > 1 && family.stages.size() > 1) {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = 0; i < family.stages.size(); ++i)
      jobs.push_back(std::async(std::launch::async, solve_stage, i));
    for (auto& j : jobs) j.get();
  } else {
    for (std::size_t i = 0; i < family.stages.size(); ++i) solve_stage(i);
  }
  SpectrumTable table = merge_tables(std::move(stage_tables));
  table.meta.geometry_hash = fnv1a(config.echo_json);

  const double tol = table.meta.route == "discretized" ? config.solver.tolerance_discretized
                                                       : config.solver.tolerance_closed_form;

  std::vector<BoundReport> reports;
  for (CheckKind kind : config.checks) {
    switch (kind) {
      case CheckKind::Thm1Lower:
        reports.push_back(check_thm1_lower(table, family, config.solver.epsilon, tol));
        break;
      case CheckKind::Thm1Upper:
        reports.push_back(check_thm1_upper(table, family, tol));
        break;
      case CheckKind::Thm1Convergence: {
        const EigenvalueList base =
            convergence_base(config, family.stages.front(), config.solver.j_count);
        // The constant-fiber combination books the full total-space spinor
        // rank, so k = 0 tables carry the base spectrum with both signs for
        // either base parity; the comparison target is doubled to match.
        reports.push_back(check_thm1_convergence(table, base, BaseParity::Odd, tol));
        break;
      }
      case CheckKind::Thm2:
        reports.push_back(check_thm2(table, family, config.solver.epsilon, tol));
        break;
      case CheckKind::Thm3:
        reports.push_back(thm3_over_stages(table, family, tol));
        break;
    }
  }

  ExperimentResult result;
  result.table = std::move(table);
  result.reports = std::move(reports);
  result.summary.alpha = alpha;
  result.summary.stages = family.stage_labels;
  result.summary.sup_series = std::move(sup_series);
  result.summary.clifford =
      clifford_norm(family.stages.back().connection, family.stages.back().profile);
  for (const auto& r : result.reports)
    result.summary.first_passing_stage[r.check] =
        r.first_passing_stage ? *r.first_passing_stage : -1;
  result.summary.route = result.table.meta.route;
  result.summary.geometry_hash_hex = hex64(result.table.meta.geometry_hash);
  result.summary.config_echo_json = config.echo_json;
  return result;
}

}  // namespace fiberspec
