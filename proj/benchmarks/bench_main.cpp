#include <benchmark/benchmark.h>

#include <random>

#include "fiberspec/eigensolve.hpp"
#include "fiberspec/sector.hpp"

namespace {

using fiberspec::cdouble;

fiberspec::HermitianMatrix random_hermitian(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cdouble> a(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    a[static_cast<std::size_t>(i) * n + i] = cdouble{u(rng), 0.0};
    for (int j = i + 1; j < n; ++j) {
      const cdouble v{u(rng), u(rng)};
      a[static_cast<std::size_t>(i) * n + j] = v;
      a[static_cast<std::size_t>(j) * n + i] = std::conj(v);
    }
  }
  return fiberspec::HermitianMatrix::from_entries(n, std::move(a));
}

fiberspec::BundleGeometry warped_geometry() {
  fiberspec::BundleGeometry g;
  g.base = fiberspec::CircleBase{2.0 * std::numbers::pi};
  g.profile.base_period = 2.0 * std::numbers::pi;
  g.profile.constant = 0.2;
  g.profile.harmonics = {{1, 0.0, 0.04}};
  g.spin = {true, {0.0}};
  g.connection.holonomy = {0.0};
  return g;
}

void BM_HermitianEigenvalues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto m = random_hermitian(n, 42);
  for (auto _ : state) {
    auto ev = fiberspec::hermitian_eigenvalues(m);
    benchmark::DoNotOptimize(ev);
  }
}
BENCHMARK(BM_HermitianEigenvalues)->Arg(64)->Arg(128)->Arg(256)->Arg(512);

void BM_FourierDiffMatrix(benchmark::State& state) {
  const int g = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto d = fiberspec::fourier_diff_matrix(g, 2.0 * std::numbers::pi, 0.5);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_FourierDiffMatrix)->Arg(64)->Arg(256);

void BM_WarpedSectorSolve(benchmark::State& state) {
  const int g = static_cast<int>(state.range(0));
  const auto geometry = warped_geometry();
  for (auto _ : state) {
    auto op = fiberspec::build_warped_sector_operator(geometry, fiberspec::sector_integer(1), g);
    auto ev = fiberspec::hermitian_eigenvalues(op.matrix);
    benchmark::DoNotOptimize(ev);
  }
}
BENCHMARK(BM_WarpedSectorSolve)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
