#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fiberspec/config.hpp"
#include "fiberspec/emit.hpp"
#include "fiberspec/experiment.hpp"

using namespace fiberspec;

namespace {

std::string minimal_flat_torus = R"({
  "geometry": {"type": "flat_torus", "periods": [1.0, 0.5]},
  "spin": {"fiber": "projectable"}
})";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const auto outcome = parse_config(minimal_flat_torus);
  REQUIRE(outcome.config.has_value());
  const auto& c = *outcome.config;
  CHECK(c.solver.grid == 256);
  CHECK(c.solver.k_lo == -3.0);
  CHECK(c.solver.k_hi == 3.0);
  CHECK(c.solver.j_count == 20);
  CHECK(c.solver.cutoff_auto);
  CHECK(c.stages == std::vector<int>{1});
  CHECK(c.base_twists == std::vector<double>{0.0});
  CHECK(c.checks.empty());
}

TEST_CASE("config echo round-trips") {
  const auto outcome = parse_config(minimal_flat_torus);
  REQUIRE(outcome.config.has_value());
  const auto again = parse_config(outcome.config->echo_json);
  REQUIRE(again.config.has_value());
  CHECK(again.config->echo_json == outcome.config->echo_json);
  CHECK(again.config->period_fiber == outcome.config->period_fiber);
  CHECK(again.config->solver.j_count == outcome.config->solver.j_count);
}

TEST_CASE("unknown keys are rejected and all violations reported") {
  const std::string bad = R"({
    "geometry": {"type": "flat_torus", "periods": [1.0, -0.5], "bogus": 1},
    "spin": {"fiber": "sideways"},
    "solver": {"grid": 7},
    "typo": {}
  })";
  const auto outcome = parse_config(bad);
  CHECK_FALSE(outcome.config.has_value());
  CHECK(outcome.errors.size() >= 4);
  bool saw_unknown = false, saw_fiber = false, saw_grid = false, saw_period = false;
  for (const auto& e : outcome.errors) {
    if (e.find("bogus") != std::string::npos || e.find("typo") != std::string::npos)
      saw_unknown = true;
    if (e.find("spin.fiber") != std::string::npos) saw_fiber = true;
    if (e.find("solver.grid") != std::string::npos) saw_grid = true;
    if (e.find("periods") != std::string::npos) saw_period = true;
  }
  CHECK(saw_unknown);
  CHECK(saw_fiber);
  CHECK(saw_grid);
  CHECK(saw_period);
}

TEST_CASE("cross-field rule: nonprojectable spin cannot ask for thm1_convergence") {
  const std::string bad = R"({
    "geometry": {"type": "flat_torus", "periods": [1.0, 0.5]},
    "spin": {"fiber": "nonprojectable"},
    "collapse": {"stages": [1, 2]},
    "checks": ["thm1_convergence"]
  })";
  const auto outcome = parse_config(bad);
  CHECK_FALSE(outcome.config.has_value());
  bool saw = false;
  for (const auto& e : outcome.errors)
    if (e.find("thm1_convergence") != std::string::npos &&
        e.find("projectable") != std::string::npos)
      saw = true;
  CHECK(saw);
}

TEST_CASE("resolution rule: frequency 32 with G = 64 names the required grid") {
  const std::string bad = R"({
    "geometry": {"type": "warped_torus", "base_length": 6.283185307179586,
                 "profile": {"constant": 2.0, "harmonics": [{"frequency": 32, "sin": 0.4}]}},
    "spin": {"fiber": "projectable"},
    "solver": {"grid": 64}
  })";
  const auto outcome = parse_config(bad);
  CHECK_FALSE(outcome.config.has_value());
  bool saw = false;
  for (const auto& e : outcome.errors)
    if (e.find("required G >= 256") != std::string::npos) saw = true;
  CHECK(saw);
}

TEST_CASE("stage geometry and auto grids") {
  const std::string text = R"({
    "geometry": {"type": "warped_torus", "base_length": 6.283185307179586,
                 "profile": {"constant": 2.0, "harmonics": [{"frequency": 1, "sin": 0.4}]}},
    "spin": {"fiber": "projectable"},
    "collapse": {"rule": "scale_amplitude_and_frequency", "stages": [4, 8, 16, 32]},
    "solver": {"grid": "auto"}
  })";
  const auto outcome = parse_config(text);
  REQUIRE(outcome.config.has_value());
  const auto& c = *outcome.config;
  CHECK(stage_grid(c, 4) == 32);
  CHECK(stage_grid(c, 32) == 256);
  const auto g = make_stage_geometry(c, 4);
  const auto f = profile_functionals(g.profile);
  CHECK(f.sup == doctest::Approx(2.4 / 4.0).epsilon(1e-12));
  CHECK(f.grad_sup == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("emit: deterministic files with the pinned headers") {
  const std::string text = R"({
    "geometry": {"type": "flat_torus", "periods": [1.0, 0.5]},
    "spin": {"fiber": "projectable"},
    "solver": {"k_range": [-1, 1], "j_count": 6}
  })";
  const auto outcome = parse_config(text);
  REQUIRE(outcome.config.has_value());
  const auto result = run_collapse_experiment(*outcome.config);

  namespace fs = std::filesystem;
  const fs::path dir1 = fs::temp_directory_path() / "fiberspec_emit_test_1";
  const fs::path dir2 = fs::temp_directory_path() / "fiberspec_emit_test_2";
  emit_results(result.table, result.reports, result.summary, dir1.string());
  emit_results(result.table, result.reports, result.summary, dir2.string());

  const std::string spectrum = read_file(dir1 / "spectrum.csv");
  CHECK(spectrum.substr(0, spectrum.find('\n')) == "n,k,j,lambda,lambda_sq,encl_lo,encl_hi");
  const std::string checks = read_file(dir1 / "checks.csv");
  CHECK(checks.substr(0, checks.find('\n')) == "check,n,k,j,value,bound,margin,pass");
  CHECK(read_file(dir1 / "spectrum.csv") == read_file(dir2 / "spectrum.csv"));
  CHECK(read_file(dir1 / "checks.csv") == read_file(dir2 / "checks.csv"));
  CHECK(read_file(dir1 / "summary.json") == read_file(dir2 / "summary.json"));
  CHECK(fs::exists(dir1 / "series"));

  // j = 0 row of the k = 0 block is the most negative selected eigenvalue
  std::istringstream lines(spectrum);
  std::string line;
  std::getline(lines, line);  // header
  double k0_j0 = 0.0, k0_min = 1e300;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string n, k, j, lambda;
    std::getline(cells, n, ',');
    std::getline(cells, k, ',');
    std::getline(cells, j, ',');
    std::getline(cells, lambda, ',');
    if (k == "0") {
      const double v = std::stod(lambda);
      if (j == "0") k0_j0 = v;
      k0_min = std::min(k0_min, v);
    }
  }
  CHECK(k0_j0 == doctest::Approx(k0_min));

  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("emit: sector formatting covers half-integers") {
  CHECK(format_sector(sector_integer(2)) == "2");
  CHECK(format_sector(sector_integer(-3)) == "-3");
  CHECK(format_sector(sector_twice(1)) == "0.5");
  CHECK(format_sector(sector_twice(-3)) == "-1.5");
}

TEST_CASE("empty sector range emits header-only csv") {
  const auto g_outcome = parse_config(R"({
    "geometry": {"type": "flat_torus", "periods": [1.0, 0.5]},
    "spin": {"fiber": "nonprojectable"},
    "solver": {"k_range": [0.1, 0.4]}
  })");
  REQUIRE(g_outcome.config.has_value());
  const auto result = run_collapse_experiment(*g_outcome.config);
  CHECK(result.table.rows.empty());
  CHECK(spectrum_csv_text(result.table) == "n,k,j,lambda,lambda_sq,encl_lo,encl_hi\n");
}

TEST_CASE("summary.json config echo round-trips through parse_config") {
  const auto outcome = parse_config(minimal_flat_torus);
  REQUIRE(outcome.config.has_value());
  const auto result = run_collapse_experiment(*outcome.config);
  const std::string summary = summary_json_text(result.table, result.summary);
  const auto root = nlohmann::json::parse(summary);
  const auto again = parse_config(root.at("config").dump());
  REQUIRE(again.config.has_value());
  CHECK(again.config->echo_json == outcome.config->echo_json);
}

TEST_CASE("emit failure leaves no partial output") {
  namespace fs = std::filesystem;
  const fs::path blocker = fs::temp_directory_path() / "fiberspec_blocker";
  std::ofstream(blocker) << "x";  // a file where a directory is needed
  const auto outcome = parse_config(minimal_flat_torus);
  REQUIRE(outcome.config.has_value());
  const auto result = run_collapse_experiment(*outcome.config);
  const std::string target = (blocker / "out").string();
  CHECK_THROWS(emit_results(result.table, result.reports, result.summary, target));
  CHECK_FALSE(fs::exists(blocker / "out"));
  // no temp dirs left behind
  for (const auto& entry : fs::directory_iterator(fs::temp_directory_path())) {
    const std::string name = entry.path().filename().string();
    CHECK(name.rfind(".tmp-out", 0) != 0);
  }
  fs::remove(blocker);
}

TEST_CASE("run_collapse_experiment rejects a non-collapsing check request") {
  const std::string text = R"({
    "geometry": {"type": "warped_torus", "base_length": 6.283185307179586,
                 "profile": {"constant": 2.0, "harmonics": [{"frequency": 1, "sin": 0.8}]}},
    "spin": {"fiber": "nonprojectable"},
    "collapse": {"rule": "scale_amplitude_and_frequency", "stages": [2, 4]},
    "solver": {"grid": "auto", "k_range": [-0.5, 0.5], "j_count": 4},
    "checks": ["thm2"]
  })";
  const auto outcome = parse_config(text);
  REQUIRE(outcome.config.has_value());
  CHECK_THROWS_AS((void)run_collapse_experiment(*outcome.config), std::invalid_argument);
}
