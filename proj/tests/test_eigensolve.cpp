#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fiberspec/eigensolve.hpp"
#include "support/linalg_oracle.hpp"

using fiberspec::cdouble;
using fiberspec::fourier_diff_matrix;
using fiberspec::HermitianMatrix;
using fiberspec::hermitian_eigenvalues;

namespace {

constexpr double kPi = std::numbers::pi;

HermitianMatrix diagonal(std::vector<double> d) {
  const int n = static_cast<int>(d.size());
  HermitianMatrix m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = d[i];
  return m;
}

}  // namespace

TEST_CASE("identity and diagonal matrices") {
  auto ev = hermitian_eigenvalues(diagonal({1.0, 1.0, 1.0}));
  CHECK(ev == std::vector<double>{1.0, 1.0, 1.0});

  ev = hermitian_eigenvalues(diagonal({5.0, -2.0, 0.0}));
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ev[2] == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("random 12x12 matches the det-sign bisection oracle") {
  auto m = test_support::random_hermitian(12, 20240101);
  const auto ev = hermitian_eigenvalues(m);
  const auto oracle = test_support::det_sign_eigenvalues(m);
  REQUIRE(ev.size() == oracle.size());
  for (std::size_t i = 0; i < ev.size(); ++i)
    CHECK(std::fabs(ev[i] - oracle[i]) <= 1e-9 * std::max(1.0, std::fabs(oracle[i])));
}

TEST_CASE("trace and Frobenius identities across sizes") {
  for (int n : {3, 8, 21, 40}) {
    auto m = test_support::random_hermitian(n, 777 + n);
    const auto ev = hermitian_eigenvalues(m);
    double sum = 0.0, sum_sq = 0.0;
    for (double v : ev) {
      sum += v;
      sum_sq += v * v;
    }
    CHECK(std::fabs(sum - m.trace_real()) <= 1e-9 * std::max(1.0, std::fabs(m.trace_real())));
    CHECK(std::fabs(sum_sq - m.frobenius_sq()) <= 1e-9 * std::max(1.0, m.frobenius_sq()));
  }
}

TEST_CASE("eigenvalues are invariant under symmetric permutation") {
  auto m = test_support::random_hermitian(9, 31337);
  std::vector<int> perm{4, 8, 0, 2, 6, 1, 7, 5, 3};
  HermitianMatrix p(9);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) p.at(i, j) = m.at(perm[i], perm[j]);
  const auto a = hermitian_eigenvalues(m);
  const auto b = hermitian_eigenvalues(p);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::fabs(a[i] - b[i]) <= 1e-11 * std::max(1.0, std::fabs(a[i])));
}

TEST_CASE("non-Hermitian input is rejected") {
  std::vector<cdouble> a{cdouble{1, 0}, cdouble{2, 1}, cdouble{2, 1}, cdouble{3, 0}};
  CHECK_THROWS_AS((void)HermitianMatrix::from_entries(2, a), std::invalid_argument);
}

TEST_CASE("backward stability: inverse iteration residuals") {
  std::mt19937_64 pick(99);
  for (int n : {16, 33}) {
    auto m = test_support::random_hermitian(n, 4242 + n);
    const auto ev = hermitian_eigenvalues(m);
    const double scale = m.max_abs();
    std::uniform_int_distribution<int> idx(0, n - 1);
    for (int trial = 0; trial < 5; ++trial) {
      const double lambda = ev[idx(pick)];
      const double res = test_support::inverse_iteration_residual(m, lambda, 1000 + trial);
      CHECK(res <= 1e-10 * std::max(scale, 1.0));
    }
  }
}

TEST_CASE("fourier_diff_matrix annihilates constants") {
  const int g = 16;
  const auto d = fourier_diff_matrix(g, 2.0 * kPi, 0.0);
  for (int r = 0; r < g; ++r) {
    cdouble acc{0, 0};
    for (int c = 0; c < g; ++c) acc += d[static_cast<std::size_t>(r) * g + c];
    CHECK(std::abs(acc) <= 1e-13);
  }
}

TEST_CASE("fourier_diff_matrix differentiates its modes exactly") {
  const int g = 32;
  const double period = 3.0;

  SUBCASE("shift 0, mode 1") {
    const auto d = fourier_diff_matrix(g, period, 0.0);
    std::vector<cdouble> f(g), want(g);
    for (int j = 0; j < g; ++j) {
      const double x = period * j / g;
      f[j] = std::polar(1.0, 2.0 * kPi * x / period);
      want[j] = cdouble{0.0, 2.0 * kPi / period} * f[j];
    }
    for (int r = 0; r < g; ++r) {
      cdouble acc{0, 0};
      for (int c = 0; c < g; ++c) acc += d[static_cast<std::size_t>(r) * g + c] * f[c];
      CHECK(std::abs(acc - want[r]) <= 1e-12);
    }
  }

  SUBCASE("shift 1/2 on the half mode") {
    const auto d = fourier_diff_matrix(g, period, 0.5);
    std::vector<cdouble> f(g), want(g);
    for (int j = 0; j < g; ++j) {
      const double x = period * j / g;
      f[j] = std::polar(1.0, kPi * x / period);
      want[j] = cdouble{0.0, kPi / period} * f[j];
    }
    for (int r = 0; r < g; ++r) {
      cdouble acc{0, 0};
      for (int c = 0; c < g; ++c) acc += d[static_cast<std::size_t>(r) * g + c] * f[c];
      CHECK(std::abs(acc - want[r]) <= 1e-12);
    }
  }
}

TEST_CASE("fourier_diff_matrix is skew-Hermitian with lattice eigenvalues") {
  const int g = 24;
  const double period = 2.0 * kPi;
  const auto d = fourier_diff_matrix(g, period, 0.0);
  double defect = 0.0;
  for (int r = 0; r < g; ++r)
    for (int c = 0; c < g; ++c)
      defect = std::max(defect, std::abs(d[static_cast<std::size_t>(r) * g + c] +
                                         std::conj(d[static_cast<std::size_t>(c) * g + r])));
  CHECK(defect <= 1e-13);

  // -i D is Hermitian with eigenvalues 2*pi*m/period
  std::vector<cdouble> h(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) h[i] = cdouble{0.0, -1.0} * d[i];
  const auto ev = hermitian_eigenvalues(HermitianMatrix::from_entries(g, std::move(h)));
  for (double v : ev) {
    const double m = v * period / (2.0 * kPi);
    CHECK(std::fabs(m - std::round(m)) <= 1e-10);
  }
}

TEST_CASE("fourier_diff_matrix rejects odd grids") {
  CHECK_THROWS_AS((void)fourier_diff_matrix(9, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)fourier_diff_matrix(2, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("tridiagonal QL agrees with known spectrum") {
  // second-difference matrix: eigenvalues 2 - 2 cos(k pi/(n+1))
  const int n = 12;
  std::vector<double> diag(n, 2.0), off(n - 1, -1.0);
  const auto ev = fiberspec::symmetric_tridiagonal_eigenvalues(diag, off);
  for (int k = 1; k <= n; ++k) {
    const double want = 2.0 - 2.0 * std::cos(k * kPi / (n + 1));
    CHECK(std::fabs(ev[k - 1] - want) <= 1e-12);
  }
}
