#pragma once

#include <vector>

namespace fiberspec {

// Truncated spectrum: sorted (value, multiplicity) pairs, complete for all
// |lambda| <= truncation_bound.
struct EigenvalueList {
  struct Entry {
    double value = 0.0;
    long multiplicity = 1;
  };

  std::vector<Entry> entries;
  double truncation_bound = 0.0;

  long total_multiplicity() const;
  double min_abs() const;
  long multiplicity_near(double value, double tol) const;
  // All eigenvalues expanded by multiplicity, ascending.
  std::vector<double> expanded() const;
};

// Dirac spectrum of the flat torus with periods a_i and spin twists
// delta_i in {0, 1/2}: lambda^2 = 4*pi^2 * sum_i (j_i + delta_i)^2 / a_i^2,
// each lattice point carrying total multiplicity 2^floor((dim+1)/2) split
// symmetrically into +-|lambda| (zero modes keep the full multiplicity and
// occur only when all twists vanish). Enumerates all |lambda| <= cutoff.
EigenvalueList flat_torus_spectrum(const std::vector<double>& periods,
                                   const std::vector<double>& twists,
                                   double cutoff);

// Dirac spectrum of the circle of length a with mode twist delta:
// {2*pi*(m + delta)/a}, multiplicity 1. delta may be any real (spin twist
// plus holonomy folding).
EigenvalueList circle_dirac_spectrum(double length, double twist, double cutoff);

// Landau levels of the twisted Dirac operator on a flat torus of the given
// area with integer flux c != 0: lambda^2 in {4*pi*|c|*m/area, m >= 0};
// zero modes carry multiplicity |c|, each nonzero level 2|c| counting both
// signs.
EigenvalueList landau_twisted_torus_spectrum(double area, long flux, double cutoff);

}  // namespace fiberspec
