#include "fiberspec/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fiberspec {

namespace {

// Householder reduction of a real symmetric matrix (full row-major storage,
// lower triangle authoritative) to tridiagonal form; eigenvalues only, no
// accumulation of transforms. d receives the diagonal, e the subdiagonal
// with e[0] = 0.
void tridiagonalize_symmetric(std::vector<double>& a, int n, std::vector<double>& d,
                              std::vector<double>& e) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  d.assign(n, 0.0);
  e.assign(n, 0.0);

  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (int k = 0; k <= l; ++k) scale += std::fabs(at(i, k));
      if (scale == 0.0) {
        e[i] = at(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          at(i, k) /= scale;
          h += at(i, k) * at(i, k);
        }
        double f = at(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        at(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
          for (int k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
          e[j] = g / h;
          f += e[j] * at(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = at(i, j);
          g = e[j] - hh * f;
          e[j] = g;
          for (int k = 0; k <= j; ++k) at(j, k) -= f * e[k] + g * at(i, k);
        }
      }
    } else {
      e[i] = at(i, l);
    }
    d[i] = h;
  }
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) d[i] = at(i, i);
}

// Implicit-shift QL on a symmetric tridiagonal matrix; d holds the diagonal,
// e the subdiagonal shifted so that e[i] couples i and i+1 (e[n-1] = 0).
void ql_implicit_shift(std::vector<double>& d, std::vector<double>& e) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    for (;;) {
      int m = l;
      while (m < n - 1) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd) break;
        ++m;
      }
      if (m == l) break;
      if (++iter > 64) throw std::runtime_error("eigensolve: QL iteration failed to converge");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (int i = m - 1; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

}  // namespace

HermitianMatrix::HermitianMatrix(int dim) : n_(dim) {
  if (dim < 1) throw std::invalid_argument("HermitianMatrix: dimension must be >= 1");
  a_.assign(static_cast<std::size_t>(dim) * dim, cdouble{0.0, 0.0});
}

HermitianMatrix HermitianMatrix::from_entries(int dim, std::vector<cdouble> entries) {
  if (dim < 1) throw std::invalid_argument("HermitianMatrix: dimension must be >= 1");
  if (entries.size() != static_cast<std::size_t>(dim) * dim)
    throw std::invalid_argument("HermitianMatrix: entry count does not match dimension");
  HermitianMatrix m(dim);
  m.a_ = std::move(entries);
  const double defect = m.hermiticity_defect();
  const double scale = m.max_abs();
  if (defect > 1e-12 * std::max(scale, 1e-300))
    throw std::invalid_argument("HermitianMatrix: input is not Hermitian (defect " +
                                std::to_string(defect) + ")");
  return m;
}

double HermitianMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : a_) m = std::max(m, std::abs(v));
  return m;
}

double HermitianMatrix::hermiticity_defect() const {
  double defect = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j)
      defect = std::max(defect, std::abs(at(i, j) - std::conj(at(j, i))));
  return defect;
}

double HermitianMatrix::trace_real() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += at(i, i).real();
  return t;
}

double HermitianMatrix::frobenius_sq() const {
  double f = 0.0;
  for (const auto& v : a_) f += std::norm(v);
  return f;
}

std::vector<double> hermitian_eigenvalues(const HermitianMatrix& m) {
  const int n = m.dim();
  const double scale = m.max_abs();
  if (m.hermiticity_defect() > 1e-12 * std::max(scale, 1e-300))
    throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");

  // Real embedding [[X, -Y], [Y, X]] of A = X + iY carries every eigenvalue
  // of A twice. Averaging the sorted pairs removes the split from rounding.
  const int N = 2 * n;
  std::vector<double> s(static_cast<std::size_t>(N) * N, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cdouble sym = 0.5 * (m.at(i, j) + std::conj(m.at(j, i)));
      const double x = sym.real();
      const double y = sym.imag();
      s[static_cast<std::size_t>(i) * N + j] = x;
      s[static_cast<std::size_t>(i) * N + (n + j)] = -y;
      s[static_cast<std::size_t>(n + i) * N + j] = y;
      s[static_cast<std::size_t>(n + i) * N + (n + j)] = x;
    }
  }

  std::vector<double> d, e;
  tridiagonalize_symmetric(s, N, d, e);
  // shift e so e[i] couples i and i+1
  for (int i = 0; i < N - 1; ++i) e[i] = e[i + 1];
  e[N - 1] = 0.0;
  ql_implicit_shift(d, e);
  std::sort(d.begin(), d.end());

  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = 0.5 * (d[2 * i] + d[2 * i + 1]);
  return out;
}

std::vector<double> symmetric_tridiagonal_eigenvalues(std::vector<double> diag,
                                                      const std::vector<double>& offdiag) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) return {};
  if (offdiag.size() + 1 != diag.size())
    throw std::invalid_argument("symmetric_tridiagonal_eigenvalues: offdiag size must be n-1");
  std::vector<double> e(n, 0.0);
  for (int i = 0; i < n - 1; ++i) e[i] = offdiag[i];
  ql_implicit_shift(diag, e);
  std::sort(diag.begin(), diag.end());
  return diag;
}

std::vector<cdouble> fourier_diff_matrix(int grid, double period, double mode_shift) {
  if (grid < 4 || grid % 2 != 0)
    throw std::invalid_argument("fourier_diff_matrix: grid must be even and >= 4");
  if (!(period > 0.0)) throw std::invalid_argument("fourier_diff_matrix: period must be positive");

  const int G = grid;
  const double two_pi = 2.0 * std::numbers::pi;

  // c[r] = (1/G) sum_{m=-G/2}^{G/2-1} i*2*pi*(m+s)/P * exp(2*pi*i*m*r/G)
  std::vector<cdouble> c(G, cdouble{0.0, 0.0});
  for (int r = 0; r < G; ++r) {
    cdouble acc{0.0, 0.0};
    for (int m = -G / 2; m < G / 2; ++m) {
      const double kappa = two_pi * (m + mode_shift) / period;
      const double phase = two_pi * m * r / G;
      acc += cdouble{0.0, kappa} * std::polar(1.0, phase);
    }
    c[r] = acc / static_cast<double>(G);
  }

  std::vector<cdouble> d(static_cast<std::size_t>(G) * G);
  for (int j = 0; j < G; ++j) {
    for (int l = 0; l < G; ++l) {
      const int r = ((j - l) % G + G) % G;
      const cdouble shift_phase = std::polar(1.0, two_pi * mode_shift * (j - l) / G);
      d[static_cast<std::size_t>(j) * G + l] = shift_phase * c[r];
    }
  }
  return d;
}

}  // namespace fiberspec
