#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fiberspec/eigensolve.hpp"
#include "fiberspec/geometry.hpp"
#include "fiberspec/model_spectra.hpp"

namespace fiberspec {

// Discretized reduced operator of one Fourier sector over a circle base.
// The 2G x 2G matrix acts on two spinor components sampled on G grid points
// (component-major blocks). It is Hermitian by construction and anticommutes
// with the blockwise sign involution diag(+I, -I).
struct SectorOperator {
  Sector k;
  int stage = 1;
  int grid = 0;
  double base_period = 0.0;
  HermitianMatrix matrix;
};

// Per-sector spectrum for constant |K| = killing_norm: each base eigenvalue
// mu (multiplicity m) contributes +-sqrt(mu^2 + k^2/killing_norm^2), each
// with multiplicity m; coinciding outputs merge.
EigenvalueList combine_constant_fiber(const EigenvalueList& base, Sector k,
                                      double killing_norm);

// Reduced sector operator for a 1-dimensional base, in the gauge where the
// ell'/(2 ell) weight has been absorbed by conjugation with ell^(1/2):
//   A_k = -i*sigma1*D_x + sigma2 * k/|K|(x),
// with D_x the Fourier differentiation matrix twisted by the base spin
// structure and by -k*holonomy/(2*pi). Requires even G >= 8*max_frequency;
// throws with the required G otherwise. Throws if k is outside the sector
// lattice of the spin structure.
SectorOperator build_warped_sector_operator(const BundleGeometry& geometry,
                                            Sector k, int grid);

struct SpectrumRow {
  int stage = 1;
  Sector k;
  int j = 0;
  double lambda = 0.0;
  double enclosure_radius = 0.0;
};

struct TableMeta {
  int grid = 0;
  double cutoff = 0.0;
  std::string route;  // "closed_form" or "discretized"
  std::uint64_t geometry_hash = 0;
};

// Eigenvalues labeled by (stage n, sector k, index j); j is the ascending
// sort index within fixed (n, k). Rows are kept sorted by (n, k, j).
struct SpectrumTable {
  std::vector<SpectrumRow> rows;
  TableMeta meta;
  bool has_enclosures = false;

  void sort_rows();
  std::vector<int> stage_labels() const;
  double min_abs_lambda(int stage) const;
};

enum class AssembleRoute { Auto, ClosedForm, Numeric };

// Per sector k in [k_lo, k_hi] (lattice-filtered), computes the spectrum and
// records the j_count eigenvalues smallest in |lambda|, sorted ascending.
// Auto picks the closed-form path for constant profiles and torus bases, and
// the warped discretization otherwise.
// cutoff_hint seeds the closed-form base-spectrum enumeration (grown as
// needed to cover j_count rows); 0 picks a default.
SpectrumTable assemble_spectrum(const BundleGeometry& geometry, double k_lo,
                                double k_hi, int j_count, int grid,
                                int stage_label = 1,
                                AssembleRoute route = AssembleRoute::Auto,
                                double cutoff_hint = 0.0);

// Annotates every row with the interval [lambda - r, lambda + r],
// r = clifford/4, enclosing the corresponding eigenvalue of the full
// operator including the zero-order curvature term.
SpectrumTable zero_order_enclosure(const SpectrumTable& table, double clifford);

SpectrumTable merge_tables(std::vector<SpectrumTable> tables);

// Effective integer flux seen by sector k over a torus base with Euler
// number c: -k*c for integer k, -(k - 1/2)*c for half-integer k.
long sector_effective_flux(Sector k, long euler);

}  // namespace fiberspec
