#include "fiberspec/sector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fiberspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int required_grid(const FiberProfile& profile) {
  const int mf = profile.max_frequency();
  int g = std::max(8, 8 * mf);
  if (g % 2 != 0) ++g;
  return g;
}

// j_count eigenvalues smallest in |lambda|, then ascending in value.
std::vector<double> select_smallest_abs(std::vector<double> lambdas, int j_count) {
  std::sort(lambdas.begin(), lambdas.end(), [](double a, double b) {
    const double aa = std::fabs(a), ab = std::fabs(b);
    if (aa != ab) return aa < ab;
    return a < b;
  });
  if (static_cast<int>(lambdas.size()) > j_count) lambdas.resize(j_count);
  std::sort(lambdas.begin(), lambdas.end());
  return lambdas;
}

EigenvalueList base_spectrum_for_sector(const BundleGeometry& g, Sector k, double cutoff) {
  if (g.base_dimension() == 1) {
    const double hol = g.connection.holonomy.empty() ? 0.0 : g.connection.holonomy[0];
    const double twist = g.spin.base_twists[0] - k.value() * hol / kTwoPi;
    return circle_dirac_spectrum(g.base_circumference(), twist, cutoff);
  }
  const auto& torus = std::get<TorusBase>(g.base);
  const long euler = g.connection.euler_numbers.empty() ? 0 : g.connection.euler_numbers[0];
  const long flux = sector_effective_flux(k, euler);
  if (flux == 0)
    return flat_torus_spectrum({torus.period_x, torus.period_y}, g.spin.base_twists, cutoff);
  return landau_twisted_torus_spectrum(torus.area(), flux, cutoff);
}

std::vector<double> closed_form_sector(const BundleGeometry& g, Sector k, int j_count,
                                       double& cutoff_used) {
  const double ell = g.killing_norm_constant();
  double cutoff = std::max(cutoff_used, 1.0);
  for (int attempt = 0; attempt < 48; ++attempt) {
    EigenvalueList base;
    try {
      base = base_spectrum_for_sector(g, k, cutoff);
    } catch (const std::runtime_error&) {
      break;  // enumeration budget; report what we have below
    }
    EigenvalueList combined = combine_constant_fiber(base, k, ell);
    std::vector<double> expanded = combined.expanded();
    if (static_cast<int>(expanded.size()) >= j_count) {
      cutoff_used = std::max(cutoff_used, cutoff);
      return select_smallest_abs(std::move(expanded), j_count);
    }
    cutoff *= 2.0;
  }
  throw std::runtime_error("assemble_spectrum: could not collect enough eigenvalues below the "
                           "enumeration budget");
}

}  // namespace

long sector_effective_flux(Sector k, long euler) {
  if (k.is_integer()) return -(k.twice / 2) * euler;
  return -((k.twice - 1) / 2) * euler;
}

EigenvalueList combine_constant_fiber(const EigenvalueList& base, Sector k,
                                      double killing_norm) {
  if (!(killing_norm > 0.0))
    throw std::invalid_argument("combine_constant_fiber: killing norm must be positive");
  const double rate = k.value() / killing_norm;

  std::map<double, long> acc;
  for (const auto& e : base.entries) {
    const double lambda = std::sqrt(e.value * e.value + rate * rate);
    if (lambda == 0.0) {
      acc[0.0] += 2 * e.multiplicity;
    } else {
      acc[lambda] += e.multiplicity;
      acc[-lambda] += e.multiplicity;
    }
  }
  EigenvalueList out;
  const double b = base.truncation_bound;
  out.truncation_bound = std::sqrt(b * b + rate * rate);
  out.entries.reserve(acc.size());
  for (const auto& [v, m] : acc) out.entries.push_back({v, m});
  return out;
}

SectorOperator build_warped_sector_operator(const BundleGeometry& geometry, Sector k,
                                            int grid) {
  if (geometry.base_dimension() != 1)
    throw std::invalid_argument(
        "build_warped_sector_operator: only 1-dimensional bases have a discretized path");
  geometry.validate();

  if (k.is_integer() != geometry.spin.fiber_projectable) {
    std::ostringstream msg;
    msg << "sector k = " << k.value() << " is not in the "
        << (geometry.spin.fiber_projectable ? "integer" : "half-integer")
        << " lattice of this spin structure";
    throw std::invalid_argument(msg.str());
  }

  const int need = required_grid(geometry.profile);
  if (grid % 2 != 0 || grid < need) {
    std::ostringstream msg;
    msg << "grid under-resolves the profile: required G >= " << need << ", got " << grid;
    throw std::invalid_argument(msg.str());
  }

  const double period = geometry.base_circumference();
  const double hol = geometry.connection.holonomy.empty() ? 0.0 : geometry.connection.holonomy[0];
  const double shift = geometry.spin.base_twists[0] - k.value() * hol / kTwoPi;

  const int G = grid;
  const std::vector<cdouble> dx = fourier_diff_matrix(G, period, shift);

  std::vector<double> rate(G);
  for (int j = 0; j < G; ++j)
    rate[j] = k.value() / geometry.killing_norm(period * j / G);

  // A = [[0, B], [B^H, 0]] with B = -i (D_x + diag(rate)); the conjugate
  // block is filled explicitly so the matrix is Hermitian bit-exactly and
  // anticommutes with diag(+I, -I).
  const int N = 2 * G;
  std::vector<cdouble> a(static_cast<std::size_t>(N) * N, cdouble{0.0, 0.0});
  const cdouble minus_i{0.0, -1.0};
  for (int r = 0; r < G; ++r) {
    for (int c = 0; c < G; ++c) {
      cdouble b = minus_i * dx[static_cast<std::size_t>(r) * G + c];
      if (r == c) b += minus_i * rate[r];
      a[static_cast<std::size_t>(r) * N + (G + c)] = b;
      a[static_cast<std::size_t>(G + c) * N + r] = std::conj(b);
    }
  }

  SectorOperator op{k, 1, G, period, HermitianMatrix::from_entries(N, std::move(a))};
  return op;
}

void SpectrumTable::sort_rows() {
  std::sort(rows.begin(), rows.end(), [](const SpectrumRow& a, const SpectrumRow& b) {
    if (a.stage != b.stage) return a.stage < b.stage;
    if (a.k.twice != b.k.twice) return a.k.twice < b.k.twice;
    return a.j < b.j;
  });
}

std::vector<int> SpectrumTable::stage_labels() const {
  std::vector<int> labels;
  for (const auto& r : rows)
    if (labels.empty() || labels.back() != r.stage) labels.push_back(r.stage);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

double SpectrumTable::min_abs_lambda(int stage) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    if (r.stage == stage) m = std::min(m, std::fabs(r.lambda));
  return m;
}

SpectrumTable assemble_spectrum(const BundleGeometry& geometry, double k_lo, double k_hi,
                                int j_count, int grid, int stage_label, AssembleRoute route,
                                double cutoff_hint) {
  geometry.validate();
  if (j_count < 1) throw std::invalid_argument("assemble_spectrum: j_count must be >= 1");

  if (route == AssembleRoute::Auto) {
    route = (geometry.base_dimension() == 1 && !geometry.profile.is_constant())
                ? AssembleRoute::Numeric
                : AssembleRoute::ClosedForm;
  }
  if (route == AssembleRoute::Numeric && geometry.base_dimension() != 1)
    throw std::invalid_argument("assemble_spectrum: numeric route requires a circle base");
  if (route == AssembleRoute::ClosedForm && !geometry.profile.is_constant())
    throw std::invalid_argument("assemble_spectrum: closed-form route requires a constant profile");

  SpectrumTable table;
  table.meta.grid = (route == AssembleRoute::Numeric) ? grid : 0;
  table.meta.route = (route == AssembleRoute::Numeric) ? "discretized" : "closed_form";

  double cutoff_used = std::max(0.0, cutoff_hint);
  const auto sectors = sectors_in_range(geometry.spin.sector_lattice(), k_lo, k_hi);
  for (Sector k : sectors) {
    std::vector<double> selected;
    if (route == AssembleRoute::Numeric) {
      SectorOperator op = build_warped_sector_operator(geometry, k, grid);
      selected = select_smallest_abs(hermitian_eigenvalues(op.matrix), j_count);
    } else {
      selected = closed_form_sector(geometry, k, j_count, cutoff_used);
    }
    for (int j = 0; j < static_cast<int>(selected.size()); ++j)
      table.rows.push_back({stage_label, k, j, selected[j], 0.0});
  }
  table.meta.cutoff = cutoff_used;
  table.sort_rows();
  return table;
}

SpectrumTable zero_order_enclosure(const SpectrumTable& table, double clifford) {
  if (clifford < 0.0)
    throw std::invalid_argument("zero_order_enclosure: clifford norm must be >= 0");
  SpectrumTable out = table;
  const double radius = clifford / 4.0;
  for (auto& r : out.rows) r.enclosure_radius = radius;
  out.has_enclosures = true;
  return out;
}

SpectrumTable merge_tables(std::vector<SpectrumTable> tables) {
  SpectrumTable out;
  for (auto& t : tables) {
    if (out.rows.empty()) {
      out.meta = t.meta;
      out.has_enclosures = t.has_enclosures;
    }
    out.has_enclosures = out.has_enclosures || t.has_enclosures;
    out.meta.grid = std::max(out.meta.grid, t.meta.grid);
    out.meta.cutoff = std::max(out.meta.cutoff, t.meta.cutoff);
    out.rows.insert(out.rows.end(), t.rows.begin(), t.rows.end());
  }
  out.sort_rows();
  return out;
}

}  // namespace fiberspec
