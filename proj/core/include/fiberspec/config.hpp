#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fiberspec/geometry.hpp"

namespace fiberspec {

enum class GeometryType { FlatTorus, WarpedTorus, FluxBundle };
enum class CollapseRule { ScaleAmplitude, ScaleAmplitudeAndFrequency };
enum class CheckKind { Thm1Lower, Thm1Upper, Thm1Convergence, Thm2, Thm3 };

std::string check_name(CheckKind kind);

struct SolverConfig {
  int grid = 256;
  bool grid_auto = false;  // per-stage G = 8 * max profile frequency
  double k_lo = -3.0;
  double k_hi = 3.0;
  int j_count = 20;
  double cutoff = 0.0;
  bool cutoff_auto = true;
  double tolerance_closed_form = 1e-6;
  double tolerance_discretized = 1e-4;
  double epsilon = 0.05;
};

struct ExperimentConfig {
  GeometryType type = GeometryType::FlatTorus;

  // flat_torus: total-space torus periods (base circle, fiber circle)
  double period_base = 1.0;
  double period_fiber = 1.0;

  // warped_torus: base circle length and |K| profile
  double base_length = 2.0 * std::numbers::pi;
  FiberProfile profile;

  // flux_bundle: base torus periods, Euler number, constant |K|
  double torus_x = 1.0;
  double torus_y = 1.0;
  long flux = 1;

  double holonomy = 0.0;

  bool projectable = true;
  std::vector<double> base_twists;

  CollapseRule rule = CollapseRule::ScaleAmplitude;
  std::vector<int> stages{1};

  SolverConfig solver;
  std::vector<CheckKind> checks;

  // Canonical JSON with all defaults resolved; parse_config(echo_json)
  // reproduces this config.
  std::string echo_json;
};

struct ParseOutcome {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;  // all schema violations, not just the first
};

ParseOutcome parse_config(const std::string& text);

// Geometry of one collapse stage (stage label n >= 1).
BundleGeometry make_stage_geometry(const ExperimentConfig& config, int stage);
CollapseFamily make_family(const ExperimentConfig& config);

// Per-stage grid honouring the auto rule.
int stage_grid(const ExperimentConfig& config, int stage);

}  // namespace fiberspec
