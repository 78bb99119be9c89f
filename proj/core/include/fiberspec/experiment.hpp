#pragma once

#include <vector>

#include "fiberspec/config.hpp"
#include "fiberspec/emit.hpp"
#include "fiberspec/sector.hpp"
#include "fiberspec/theorems.hpp"

namespace fiberspec {

struct ExperimentResult {
  SpectrumTable table;
  std::vector<BoundReport> reports;
  RunSummary summary;

  bool all_checks_pass() const;
};

// End-to-end driver: builds the collapse family, validates the collapse
// conditions when asymptotic checks are requested, assembles per-stage
// spectra (optionally in parallel over sectors, FIBERSPEC_THREADS), applies
// the zero-order enclosure for flux geometries and runs the requested
// checks. Deterministic: identical configs produce identical tables and
// reports.
ExperimentResult run_collapse_experiment(const ExperimentConfig& config);

}  // namespace fiberspec
