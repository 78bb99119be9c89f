#pragma once

#include <map>
#include <string>
#include <vector>

#include "fiberspec/sector.hpp"
#include "fiberspec/theorems.hpp"

namespace fiberspec {

struct RunSummary {
  double alpha = 0.0;
  std::vector<int> stages;
  std::vector<double> sup_series;
  double clifford = 0.0;
  std::map<std::string, int> first_passing_stage;  // -1 when never passing
  std::string route;
  std::string geometry_hash_hex;
  std::string config_echo_json;
};

// Writes spectrum.csv, checks.csv, summary.json and series/*.csv into
// out_dir. Numbers carry 12 significant digits; rows are sorted (n, k, j);
// output is byte-deterministic. Writing goes through a temporary directory
// that is renamed into place; partial output is removed on failure.
void emit_results(const SpectrumTable& table, const std::vector<BoundReport>& reports,
                  const RunSummary& summary, const std::string& out_dir);

// spectrum.csv only (the `spectrum` subcommand).
void emit_spectrum_only(const SpectrumTable& table, const std::string& out_dir);

std::string format_number(double v);  // %.12g with -0 normalized
std::string format_sector(Sector k);

std::string spectrum_csv_text(const SpectrumTable& table);
std::string checks_csv_text(const std::vector<BoundReport>& reports);
std::string summary_json_text(const SpectrumTable& table, const RunSummary& summary);

}  // namespace fiberspec
