#include "fiberspec/model_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fiberspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long kEnumerationBudget = 4'000'000;

EigenvalueList from_map(const std::map<double, long>& acc, double bound) {
  EigenvalueList out;
  out.truncation_bound = bound;
  out.entries.reserve(acc.size());
  for (const auto& [v, m] : acc) out.entries.push_back({v, m});
  return out;
}

}  // namespace

long EigenvalueList::total_multiplicity() const {
  long t = 0;
  for (const auto& e : entries) t += e.multiplicity;
  return t;
}

double EigenvalueList::min_abs() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) m = std::min(m, std::fabs(e.value));
  return m;
}

long EigenvalueList::multiplicity_near(double value, double tol) const {
  long m = 0;
  for (const auto& e : entries)
    if (std::fabs(e.value - value) <= tol) m += e.multiplicity;
  return m;
}

std::vector<double> EigenvalueList::expanded() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(total_multiplicity()));
  for (const auto& e : entries)
    for (long i = 0; i < e.multiplicity; ++i) out.push_back(e.value);
  return out;
}

EigenvalueList flat_torus_spectrum(const std::vector<double>& periods,
                                   const std::vector<double>& twists, double cutoff) {
  const int dim = static_cast<int>(periods.size());
  if (dim < 1) throw std::invalid_argument("flat_torus_spectrum: need at least one period");
  if (twists.size() != periods.size())
    throw std::invalid_argument("flat_torus_spectrum: one twist per period required");
  if (!(cutoff > 0.0)) throw std::invalid_argument("flat_torus_spectrum: cutoff must be positive");
  for (double a : periods)
    if (!(a > 0.0)) throw std::invalid_argument("flat_torus_spectrum: periods must be positive");
  for (double t : twists)
    if (t != 0.0 && t != 0.5)
      throw std::invalid_argument("flat_torus_spectrum: twists must be 0 or 1/2");

  // per-axis mode window |j + delta| <= cutoff * a / (2 pi)
  std::vector<long> lo(dim), hi(dim);
  long points = 1;
  for (int i = 0; i < dim; ++i) {
    const double radius = cutoff * periods[i] / kTwoPi;
    lo[i] = static_cast<long>(std::floor(-radius - twists[i]));
    hi[i] = static_cast<long>(std::ceil(radius - twists[i]));
    const long count = hi[i] - lo[i] + 1;
    if (count <= 0 || points > kEnumerationBudget / count)
      throw std::runtime_error("flat_torus_spectrum: cutoff exceeds the enumeration budget");
    points *= count;
  }

  const long rank = 1L << ((dim + 1) / 2);  // total multiplicity per lattice point
  std::map<double, long> acc;
  std::vector<long> j(dim, 0);
  for (int i = 0; i < dim; ++i) j[i] = lo[i];
  for (;;) {
    double sq = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double f = (j[i] + twists[i]) / periods[i];
      sq += f * f;
    }
    const double lambda = kTwoPi * std::sqrt(sq);
    if (lambda <= cutoff) {
      if (lambda == 0.0) {
        acc[0.0] += rank;
      } else {
        acc[lambda] += rank / 2;
        acc[-lambda] += rank / 2;
      }
    }
    int axis = 0;
    while (axis < dim) {
      if (++j[axis] <= hi[axis]) break;
      j[axis] = lo[axis];
      ++axis;
    }
    if (axis == dim) break;
  }
  return from_map(acc, cutoff);
}

EigenvalueList circle_dirac_spectrum(double length, double twist, double cutoff) {
  if (!(length > 0.0)) throw std::invalid_argument("circle_dirac_spectrum: length must be positive");
  if (!(cutoff > 0.0)) throw std::invalid_argument("circle_dirac_spectrum: cutoff must be positive");

  const double radius = cutoff * length / kTwoPi;
  const long lo = static_cast<long>(std::floor(-radius - twist));
  const long hi = static_cast<long>(std::ceil(radius - twist));
  if (hi - lo + 1 > kEnumerationBudget)
    throw std::runtime_error("circle_dirac_spectrum: cutoff exceeds the enumeration budget");

  std::map<double, long> acc;
  for (long m = lo; m <= hi; ++m) {
    const double lambda = kTwoPi * (m + twist) / length;
    if (std::fabs(lambda) <= cutoff) acc[lambda] += 1;
  }
  return from_map(acc, cutoff);
}

EigenvalueList landau_twisted_torus_spectrum(double area, long flux, double cutoff) {
  if (flux == 0)
    throw std::invalid_argument(
        "landau_twisted_torus_spectrum: flux must be nonzero (use flat_torus_spectrum)");
  if (!(area > 0.0))
    throw std::invalid_argument("landau_twisted_torus_spectrum: area must be positive");
  if (!(cutoff > 0.0))
    throw std::invalid_argument("landau_twisted_torus_spectrum: cutoff must be positive");

  const long mult = std::labs(flux);
  const double step = 4.0 * std::numbers::pi * mult / area;
  std::map<double, long> acc;
  acc[0.0] += mult;
  for (long m = 1;; ++m) {
    const double sq = step * m;
    const double lambda = std::sqrt(sq);
    if (lambda > cutoff) break;
    acc[lambda] += mult;
    acc[-lambda] += mult;
    if (m > kEnumerationBudget)
      throw std::runtime_error("landau_twisted_torus_spectrum: cutoff exceeds the budget");
  }
  return from_map(acc, cutoff);
}

}  // namespace fiberspec
