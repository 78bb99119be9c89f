#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fiberspec/theorems.hpp"
#include "support/test_geometries.hpp"

using namespace fiberspec;
using test_support::constant_profile;
using test_support::sine_profile;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Flat torus entered through a constant |K| profile (fiber length 2*pi*ell).
CollapseFamily constant_family(bool projectable, const std::vector<int>& stages) {
  CollapseFamily family;
  for (int n : stages) {
    family.stages.push_back(test_support::warped_circle_geometry(constant_profile(1.0 / n),
                                                                 projectable, 0.0, 0.0, 1.0));
    family.stage_labels.push_back(n);
  }
  return family;
}

SpectrumTable assemble_family(const CollapseFamily& family, double k_lo, double k_hi,
                              int j_count) {
  std::vector<SpectrumTable> tables;
  for (std::size_t i = 0; i < family.stages.size(); ++i)
    tables.push_back(assemble_spectrum(family.stages[i], k_lo, k_hi, j_count, 0,
                                       family.stage_labels[i]));
  return merge_tables(std::move(tables));
}

}  // namespace

TEST_CASE("thm1 lower: constant-profile torus family has sharp margins") {
  const auto family = constant_family(true, {1, 2, 4, 8});
  const auto table = assemble_family(family, -1.0, 1.0, 12);
  const auto report = check_thm1_lower(table, family, 0.0, 1e-9);
  CHECK(report.pass);
  CHECK(report.alpha == doctest::Approx(0.0));
  REQUIRE(report.first_passing_stage.has_value());
  CHECK(*report.first_passing_stage == 1);

  // sup(ell)^2 lambda^2 = 1 + (2 pi j ell)^2 for |k| = 1: margin >= 0, and
  // exactly 0 for the j = 0 rows at every stage.
  for (const auto& r : report.rows) CHECK(r.margin >= -1e-12);
  for (int n : {1, 2, 4, 8}) {
    double smallest = 1e300;
    for (const auto& r : report.rows)
      if (r.stage == n) smallest = std::min(smallest, r.margin);
    CHECK(std::fabs(smallest) <= 1e-9);
  }
}

TEST_CASE("thm1 lower: k = 0 rows are excluded") {
  const auto family = constant_family(true, {1, 2});
  const auto table = assemble_family(family, 0.0, 0.0, 8);
  const auto report = check_thm1_lower(table, family, 0.05, 1e-9);
  CHECK(report.rows.empty());
  CHECK_FALSE(report.pass);
}

TEST_CASE("thm1 lower: non-projectable table is the wrong theorem") {
  const auto family = constant_family(false, {1, 2});
  const auto table = assemble_family(family, -1.0, 1.0, 4);
  CHECK_THROWS_AS((void)check_thm1_lower(table, family, 0.0, 1e-9), std::invalid_argument);
}

TEST_CASE("thm1 upper: constant-profile torus attains the bound in the limit") {
  // The limsup is taken per fixed (j, k); at the last finite stage each row
  // still carries a (2 pi j min_ell)^2 remainder, so the check needs a deep
  // family and a small j window.
  const auto family = constant_family(true, {1, 2, 4, 8, 16, 32, 64});
  const auto table = assemble_family(family, -2.0, 2.0, 6);
  const auto report = check_thm1_upper(table, family, 2e-2);
  CHECK(report.pass);
  for (const auto& r : report.rows) {
    CHECK(r.margin >= -2e-2);
    const double kabs = std::fabs(r.k.value());
    // never below the exact limit value |k|^2
    CHECK(r.value >= kabs * kabs - 1e-9);
  }
  // the j = 0 rows attain the bound exactly (alpha = 0)
  double best = 1e300;
  for (const auto& r : report.rows) best = std::min(best, std::fabs(r.margin));
  CHECK(best <= 1e-9);
}

TEST_CASE("thm1 upper: varying connection is rejected") {
  auto family = constant_family(true, {1, 2});
  family.stages[1].connection.holonomy = {0.4};
  const auto table = assemble_family(family, -1.0, 1.0, 4);
  CHECK_THROWS_AS((void)check_thm1_upper(table, family, 1e-6), std::invalid_argument);
}

TEST_CASE("thm1 convergence: constant-profile torus k=0 block is exact") {
  const auto family = constant_family(true, {1, 2, 4});
  const auto table = assemble_family(family, 0.0, 0.0, 10);
  const auto base = circle_dirac_spectrum(1.0, 0.0, 20.0 * kTwoPi);
  const auto report = check_thm1_convergence(table, base, BaseParity::Odd, 1e-9);
  CHECK(report.pass);
  for (const auto& r : report.rows) CHECK(std::fabs(r.value) <= 1e-10);
}

TEST_CASE("thm1 convergence: even-parity target matches an undoubled table") {
  // hand-built table holding exactly the base spectrum
  const auto base = flat_torus_spectrum({1.0, 1.0}, {0.0, 0.0}, 10.0);
  SpectrumTable table;
  int j = 0;
  for (double v : base.expanded()) table.rows.push_back({1, sector_integer(0), j++, v, 0.0});
  table.sort_rows();
  const auto report = check_thm1_convergence(table, base, BaseParity::Even, 1e-12);
  CHECK(report.pass);
  for (const auto& r : report.rows) CHECK(r.value <= 1e-12);
}

TEST_CASE("thm1 convergence: flux bundle k=0 block reproduces the base torus spectrum") {
  CollapseFamily family;
  for (int n : {1, 2}) {
    family.stages.push_back(test_support::flux_bundle_geometry(1.0, 1.0, 1, 0.1 / n, true));
    family.stage_labels.push_back(n);
  }
  const auto table = assemble_family(family, 0.0, 0.0, 16);
  // closed-form tables double the base multiplicities, so the target doubles
  const auto base = flat_torus_spectrum({1.0, 1.0}, {0.0, 0.0}, 60.0);
  const auto report = check_thm1_convergence(table, base, BaseParity::Odd, 1e-10);
  CHECK(report.pass);
  for (const auto& r : report.rows) CHECK(r.value <= 1e-10);
}

TEST_CASE("thm1 convergence: missing k=0 rows is an error") {
  const auto family = constant_family(true, {1, 2});
  const auto table = assemble_family(family, 1.0, 2.0, 4);
  const auto base = circle_dirac_spectrum(1.0, 0.0, 50.0);
  CHECK_THROWS_AS((void)check_thm1_convergence(table, base, BaseParity::Odd, 1e-6),
                  std::invalid_argument);
}

TEST_CASE("thm1 convergence: short base list is a cutoff inconsistency") {
  const auto family = constant_family(true, {1, 2});
  const auto table = assemble_family(family, 0.0, 0.0, 10);
  EigenvalueList tiny;
  tiny.entries = {{0.0, 1}};
  tiny.truncation_bound = 1.0;
  CHECK_THROWS_AS((void)check_thm1_convergence(table, tiny, BaseParity::Odd, 1e-6),
                  std::invalid_argument);
}

TEST_CASE("thm2: flat torus with periods (1, 1/n) diverges like pi*n") {
  // Period-convention stages: profile stores the fiber period 1/n.
  CollapseFamily family;
  for (int n : {1, 2, 4, 8}) {
    family.stages.push_back(test_support::flat_torus_geometry(1.0, 1.0 / n, false, 0.0));
    family.stage_labels.push_back(n);
  }
  const auto table = assemble_family(family, -2.0, 2.0, 10);
  for (int n : {1, 2, 4, 8})
    CHECK(table.min_abs_lambda(n) == doctest::Approx(kPi * n).epsilon(1e-12));

  const auto report = check_thm2(table, family, 0.05, 1e-9);
  CHECK(report.pass);
  REQUIRE(report.first_passing_stage.has_value());
  CHECK(*report.first_passing_stage == 1);
}

TEST_CASE("thm2: threshold arithmetic of the divergence floor") {
  // alpha = 0.4, eps = 0.01: floor numerator sqrt(1/4 - 0.2) - 0.01
  const double floor_num = std::sqrt(0.25 - 0.2) - 0.01;
  CHECK(floor_num == doctest::Approx(0.2136067977).epsilon(1e-8));
}

TEST_CASE("thm2: integer-k rows are a spin mismatch") {
  const auto family = constant_family(true, {1, 2});
  const auto table = assemble_family(family, -1.0, 1.0, 4);
  auto nonproj = family;
  for (auto& g : nonproj.stages) g.spin.fiber_projectable = false;
  CHECK_THROWS_AS((void)check_thm2(table, nonproj, 0.05, 1e-9), std::invalid_argument);
}

TEST_CASE("thm3: flat torus, constant fiber period") {
  for (double ell : {0.2, 0.1, 0.05}) {
    const auto g = test_support::flat_torus_geometry(1.0, ell, false, 0.0);
    auto table = assemble_spectrum(g, -3.0, 3.0, 20, 0, 1);
    table = zero_order_enclosure(table, 0.0);
    const auto report = check_thm3(table, g, 1e-9);
    CHECK(report.applicable);
    CHECK(report.pass);
    CHECK(report.bound_term_leading == doctest::Approx(1.0 / (2.0 * ell)).epsilon(1e-12));
    CHECK(report.bound_term_zero_order == 0.0);
    // min |lambda| = pi/ell, so the worst margin is (pi - 1/2)/ell
    CHECK(report.worst_margin == doctest::Approx((kPi - 0.5) / ell).epsilon(1e-9));
  }
}

TEST_CASE("thm3: bound formula with gradient 0.4") {
  // ell(x) = (2 + 0.4 sin(20 x))/20: sup|grad ell| stays 0.4
  const auto profile = sine_profile(2.0, 0.4, 1).frequency_scaled(20).scaled(1.0 / 20);
  const auto g = test_support::warped_circle_geometry(profile, false, 0.0, 0.0);
  auto table = assemble_spectrum(g, -1.0, 1.0, 6, 160, 1, AssembleRoute::Numeric);
  const auto report = check_thm3(table, g, 1e-6);
  CHECK(report.applicable);
  CHECK(report.alpha == doctest::Approx(0.4).epsilon(1e-10));
  const double sup = profile_functionals(g.profile).sup;
  CHECK(report.bound_term_leading == doctest::Approx(std::sqrt(1.0 - 0.8) / (2.0 * sup)));
}

TEST_CASE("thm3: flux bundle enclosure edges clear the bound") {
  const auto g = test_support::flux_bundle_geometry(1.0, 1.0, 1, 0.1, false);
  auto table = assemble_spectrum(g, -2.0, 2.0, 12, 0, 1);
  const double clifford = clifford_norm(g.connection, g.profile);
  table = zero_order_enclosure(table, clifford);
  const auto report = check_thm3(table, g, 1e-9);
  CHECK(report.pass);
  CHECK(report.bound_term_leading == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(report.bound_term_zero_order == doctest::Approx(0.1 * kTwoPi / 4.0).epsilon(1e-12));
}

TEST_CASE("thm3: projectable geometry is the wrong theorem") {
  const auto g = test_support::flat_torus_geometry(1.0, 0.5, true, 0.0);
  const auto table = assemble_spectrum(g, -1.0, 1.0, 4, 0, 1);
  CHECK_THROWS_AS((void)check_thm3(table, g, 1e-9), std::invalid_argument);
}

TEST_CASE("thm3: steep gradients make the bound inapplicable") {
  // ell(x) = (2 + 0.8 sin(10 x))/10: sup|grad ell| = 0.8 >= 1/2
  const auto profile = sine_profile(2.0, 0.8, 1).frequency_scaled(10).scaled(1.0 / 10);
  const auto g = test_support::warped_circle_geometry(profile, false, 0.0, 0.0);
  auto table = assemble_spectrum(g, -1.0, 1.0, 4, 80, 1, AssembleRoute::Numeric);
  const auto report = check_thm3(table, g, 1e-9);
  CHECK_FALSE(report.applicable);
  CHECK_FALSE(report.pass);
}

TEST_CASE("thm3: profile scaling moves eigenvalues and bound together") {
  for (double c : {0.5, 2.0}) {
    const auto g = test_support::flat_torus_geometry(1.0, 0.1 * c, false, 0.0);
    auto table = assemble_spectrum(g, -2.0, 2.0, 10, 0, 1);
    table = zero_order_enclosure(table, 0.0);
    const auto report = check_thm3(table, g, 1e-9);
    CHECK(report.pass);
    CHECK(report.worst_margin == doctest::Approx((kPi - 0.5) / (0.1 * c)).epsilon(1e-9));
  }
}

TEST_CASE("reports are deterministic") {
  const auto family = constant_family(true, {1, 2, 4});
  const auto table = assemble_family(family, -2.0, 2.0, 8);
  const auto a = check_thm1_lower(table, family, 0.05, 1e-9);
  const auto b = check_thm1_lower(table, family, 0.05, 1e-9);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].value == b.rows[i].value);
    CHECK(a.rows[i].margin == b.rows[i].margin);
    CHECK(a.rows[i].pass == b.rows[i].pass);
  }
}
