#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fiberspec/config.hpp"
#include "fiberspec/emit.hpp"
#include "fiberspec/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitCheckFailed = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fiberspec::ExperimentConfig load_or_exit(const std::string& path) {
  fiberspec::ParseOutcome outcome = fiberspec::parse_config(read_file(path));
  if (!outcome.config) {
    std::cerr << "invalid config " << path << ":\n";
    for (const auto& e : outcome.errors) std::cerr << "  " << e << "\n";
    std::exit(kExitInputError);
  }
  return std::move(*outcome.config);
}

void print_reports(const std::vector<fiberspec::BoundReport>& reports) {
  for (const auto& r : reports) {
    std::cout << r.check << ": " << (r.pass ? "pass" : "FAIL");
    if (!r.applicable) std::cout << " (inapplicable)";
    if (r.first_passing_stage) std::cout << ", n0 = " << *r.first_passing_stage;
    std::cout << ", rows = " << r.rows.size() << ", failing = " << r.failing_rows
              << ", worst margin = " << r.worst_margin << "\n";
    for (const auto& note : r.notes) std::cout << "  note: " << note << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirac spectra of collapsing circle bundles"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;

  CLI::App* run = app.add_subcommand("run", "run the experiment and all requested checks");
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--out", out_dir, "output directory")->required();

  CLI::App* validate = app.add_subcommand("validate", "validate a config and echo it");
  validate->add_option("config", config_path, "JSON experiment config")->required();

  CLI::App* spectrum = app.add_subcommand("spectrum", "spectrum table only, no checks");
  spectrum->add_option("config", config_path, "JSON experiment config")->required();
  spectrum->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      fiberspec::ExperimentConfig config = load_or_exit(config_path);
      std::cout << config.echo_json << "\n";
      return kExitOk;
    }

    fiberspec::ExperimentConfig config = load_or_exit(config_path);
    if (spectrum->parsed()) {
      fiberspec::ExperimentConfig no_checks = config;
      no_checks.checks.clear();
      fiberspec::ExperimentResult result = fiberspec::run_collapse_experiment(no_checks);
      fiberspec::emit_spectrum_only(result.table, out_dir);
      std::cout << "wrote " << out_dir << "/spectrum.csv (" << result.table.rows.size()
                << " rows)\n";
      return kExitOk;
    }

    fiberspec::ExperimentResult result = fiberspec::run_collapse_experiment(config);
    fiberspec::emit_results(result.table, result.reports, result.summary, out_dir);
    print_reports(result.reports);
    std::cout << "wrote " << out_dir << "\n";
    return result.all_checks_pass() ? kExitOk : kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
