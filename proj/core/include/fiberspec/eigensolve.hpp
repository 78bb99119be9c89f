#pragma once

#include <complex>
#include <vector>

namespace fiberspec {

using cdouble = std::complex<double>;

// Dense Hermitian matrix, row-major complex storage. Construction through
// from_entries enforces entry(i,j) == conj(entry(j,i)) to 1e-12 relative.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(int dim);
  static HermitianMatrix from_entries(int dim, std::vector<cdouble> entries);

  int dim() const { return n_; }
  cdouble& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const cdouble& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<cdouble>& data() const { return a_; }

  double max_abs() const;
  double hermiticity_defect() const;  // max_ij |a(i,j) - conj(a(j,i))|
  double trace_real() const;
  double frobenius_sq() const;

 private:
  int n_;
  std::vector<cdouble> a_;
};

// All eigenvalues, ascending. Householder tridiagonalization of the
// real-embedded matrix followed by implicit-shift QL. Throws
// std::invalid_argument on non-Hermitian input.
std::vector<double> hermitian_eigenvalues(const HermitianMatrix& m);

// Eigenvalues of a real symmetric tridiagonal matrix (diag size n,
// offdiag size n-1), ascending.
std::vector<double> symmetric_tridiagonal_eigenvalues(std::vector<double> diag,
                                                      const std::vector<double>& offdiag);

// G x G spectral differentiation matrix for d/dx on [0, period) with
// twisted boundary condition psi(x + period) = exp(2*pi*i*mode_shift) psi(x).
// Exact on the modes exp(2*pi*i*(m + mode_shift)*x/period) for
// m in {-G/2, ..., G/2-1}; skew-Hermitian. Requires even G >= 4.
std::vector<cdouble> fourier_diff_matrix(int grid, double period, double mode_shift);

}  // namespace fiberspec
