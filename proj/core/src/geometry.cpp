#include "fiberspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fiberspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Golden-section maximization on [a, b] for a smooth bracket.
double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 90 && (b - a) > 1e-15 * std::max(1.0, std::fabs(a) + std::fabs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(f((a + b) / 2.0), std::max(f1, f2));
}

// Global maximum of a periodic smooth function: dense sampling, then
// golden-section refinement of every local-maximum bracket. Flat plateaus
// (constant profiles) need no refinement, the grid value is already exact.
double periodic_max(const std::function<double(double)>& f, double period, int max_freq) {
  const int samples = std::max(4096, 128 * (max_freq + 1));
  std::vector<double> vals(samples);
  for (int i = 0; i < samples; ++i) vals[i] = f(period * i / samples);

  double best = *std::max_element(vals.begin(), vals.end());
  for (int i = 0; i < samples; ++i) {
    const double prev = vals[(i + samples - 1) % samples];
    const double next = vals[(i + 1) % samples];
    const bool bracket =
        (vals[i] >= prev && vals[i] > next) || (vals[i] > prev && vals[i] >= next);
    if (bracket) {
      const double a = period * (i - 1) / samples;
      const double b = period * (i + 1) / samples;
      best = std::max(best, golden_max(f, a, b));
    }
  }
  return best;
}

}  // namespace

double FiberProfile::value(double x) const {
  double v = constant;
  for (const auto& h : harmonics) {
    const double w = kTwoPi * h.frequency * x / base_period;
    v += h.cos_coeff * std::cos(w) + h.sin_coeff * std::sin(w);
  }
  return v;
}

double FiberProfile::derivative(double x) const {
  double v = 0.0;
  for (const auto& h : harmonics) {
    const double omega = kTwoPi * h.frequency / base_period;
    const double w = omega * x;
    v += -h.cos_coeff * omega * std::sin(w) + h.sin_coeff * omega * std::cos(w);
  }
  return v;
}

int FiberProfile::max_frequency() const {
  int f = 0;
  for (const auto& h : harmonics)
    if (h.cos_coeff != 0.0 || h.sin_coeff != 0.0) f = std::max(f, h.frequency);
  return f;
}

bool FiberProfile::is_constant() const { return max_frequency() == 0; }

FiberProfile FiberProfile::scaled(double factor) const {
  FiberProfile out = *this;
  out.constant *= factor;
  for (auto& h : out.harmonics) {
    h.cos_coeff *= factor;
    h.sin_coeff *= factor;
  }
  return out;
}

FiberProfile FiberProfile::phase_shifted(double shift) const {
  FiberProfile out = *this;
  for (auto& h : out.harmonics) {
    const double w = kTwoPi * h.frequency * shift / base_period;
    const double c = std::cos(w), s = std::sin(w);
    // cos(w(x+s)) = cos wx cos ws - sin wx sin ws, same for sin
    const double a = h.cos_coeff, b = h.sin_coeff;
    h.cos_coeff = a * c + b * s;
    h.sin_coeff = -a * s + b * c;
  }
  return out;
}

FiberProfile FiberProfile::frequency_scaled(int factor) const {
  if (factor < 1) throw std::invalid_argument("FiberProfile: frequency factor must be >= 1");
  FiberProfile out = *this;
  for (auto& h : out.harmonics) h.frequency *= factor;
  return out;
}

ProfileFunctionals profile_functionals(const FiberProfile& profile) {
  if (!(profile.base_period > 0.0))
    throw std::invalid_argument("fiber profile: base period must be positive");
  const int mf = profile.max_frequency();
  ProfileFunctionals out;
  out.sup = periodic_max([&](double x) { return profile.value(x); }, profile.base_period, mf);
  out.min = -periodic_max([&](double x) { return -profile.value(x); }, profile.base_period, mf);
  out.grad_sup =
      periodic_max([&](double x) { return std::fabs(profile.derivative(x)); },
                   profile.base_period, mf);
  if (!(out.min > 0.0))
    throw std::invalid_argument("fiber profile: must be strictly positive (min " +
                                std::to_string(out.min) + ")");
  return out;
}

double clifford_norm(const ConnectionData& connection, const FiberProfile& profile) {
  std::set<int> used;
  double coeff_sum = 0.0;
  for (const auto& plane : connection.curvature) {
    if (plane.axis_a == plane.axis_b)
      throw std::invalid_argument("clifford_norm: degenerate curvature plane");
    if (!used.insert(plane.axis_a).second || !used.insert(plane.axis_b).second)
      throw std::invalid_argument(
          "clifford_norm: overlapping curvature planes are outside the supported normal form");
    coeff_sum += std::fabs(plane.coefficient);
  }
  if (coeff_sum == 0.0) return 0.0;
  return profile_functionals(profile).sup * coeff_sum;
}

std::vector<Sector> sectors_in_range(SectorLattice lattice, double lo, double hi) {
  std::vector<Sector> out;
  if (lo > hi) return out;
  if (lattice == SectorLattice::Integers) {
    const int first = static_cast<int>(std::ceil(lo - 1e-12));
    const int last = static_cast<int>(std::floor(hi + 1e-12));
    for (int k = first; k <= last; ++k) out.push_back(sector_integer(k));
  } else {
    // odd values of 2k inside [2*lo, 2*hi]
    int first = static_cast<int>(std::ceil(2.0 * lo - 1e-12));
    if (first % 2 == 0) ++first;
    const int last = static_cast<int>(std::floor(2.0 * hi + 1e-12));
    for (int t = first; t <= last; t += 2) out.push_back(sector_twice(t));
  }
  return out;
}

int BundleGeometry::base_dimension() const {
  return std::holds_alternative<CircleBase>(base) ? 1 : 2;
}

double BundleGeometry::base_circumference() const {
  if (const auto* c = std::get_if<CircleBase>(&base)) return c->circumference;
  throw std::invalid_argument("BundleGeometry: base is not a circle");
}

double BundleGeometry::killing_norm(double x) const {
  const double v = profile.value(x);
  return fiber_convention == FiberConvention::FiberPeriod ? v / kTwoPi : v;
}

double BundleGeometry::killing_norm_constant() const {
  if (!profile.is_constant())
    throw std::invalid_argument("BundleGeometry: profile is not constant");
  return killing_norm(0.0);
}

void BundleGeometry::validate() const {
  const int dim = base_dimension();
  if (static_cast<int>(spin.base_twists.size()) != dim)
    throw std::invalid_argument("BundleGeometry: base_twists count must equal base dimension");
  for (double t : spin.base_twists)
    if (t != 0.0 && t != 0.5)
      throw std::invalid_argument("BundleGeometry: base twists must be 0 or 1/2");
  if (static_cast<int>(connection.holonomy.size()) > dim)
    throw std::invalid_argument("BundleGeometry: more holonomy entries than base generators");
  if (dim == 1 && !connection.curvature.empty())
    throw std::invalid_argument("BundleGeometry: a 1-dimensional base forces d(omega) = 0");
  for (const auto& plane : connection.curvature)
    if (plane.axis_a < 0 || plane.axis_a >= dim || plane.axis_b < 0 || plane.axis_b >= dim)
      throw std::invalid_argument("BundleGeometry: curvature plane index outside base frame");
  if (const auto* torus = std::get_if<TorusBase>(&base)) {
    // Flux quantization: integral of d(omega) over the base 2-cycle must be
    // 2*pi times the Euler number.
    double integral = 0.0;
    for (const auto& plane : connection.curvature) integral += plane.coefficient;
    integral *= torus->area();
    const double expected =
        connection.euler_numbers.empty() ? 0.0 : kTwoPi * connection.euler_numbers[0];
    if (std::fabs(integral - expected) > 1e-9 * std::max(1.0, std::fabs(expected)))
      throw std::invalid_argument("BundleGeometry: curvature violates flux quantization");
  }
  profile_functionals(profile);  // positivity
}

double collapse_alpha(const CollapseFamily& family) {
  const std::size_t n = family.stages.size();
  if (n == 0) throw std::invalid_argument("collapse_alpha: empty family");
  const std::size_t tail_start = n / 2;
  double alpha = 0.0;
  for (std::size_t i = tail_start; i < n; ++i)
    alpha = std::max(alpha, profile_functionals(family.stages[i].profile).grad_sup);
  return alpha;
}

CollapseReport validate_collapse_family(const CollapseFamily& family, SectorLattice mode) {
  const std::size_t n = family.stages.size();
  if (n < 2) throw std::invalid_argument("validate_collapse_family: need at least 2 stages");
  if (!family.stage_labels.empty() && family.stage_labels.size() != n)
    throw std::invalid_argument("validate_collapse_family: stage label count mismatch");

  const auto& first = family.stages.front();
  for (const auto& g : family.stages) {
    if (g.base_dimension() != first.base_dimension() ||
        g.spin.fiber_projectable != first.spin.fiber_projectable ||
        g.spin.base_twists != first.spin.base_twists)
      throw std::invalid_argument(
          "validate_collapse_family: stages must share base descriptor and spin structure");
  }

  CollapseReport report;
  report.threshold = (mode == SectorLattice::Integers) ? 1.0 : 0.5;
  report.alpha = collapse_alpha(family);

  for (const auto& g : family.stages) {
    report.sup_series.push_back(profile_functionals(g.profile).sup);
    report.clifford_series.push_back(clifford_norm(g.connection, g.profile));
  }

  auto label = [&](std::size_t i) {
    return family.stage_labels.empty() ? static_cast<int>(i) : family.stage_labels[i];
  };

  bool ok = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (report.sup_series[i] > report.sup_series[i - 1] * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "sup(ell) is not non-increasing at stage " << label(i);
      report.diagnostics.push_back(msg.str());
      ok = false;
    }
    if (report.clifford_series[i] > report.clifford_series[i - 1] + 1e-12) {
      std::ostringstream msg;
      msg << "||ell d(omega)||_Cl is not non-increasing at stage " << label(i);
      report.diagnostics.push_back(msg.str());
      ok = false;
    }
  }
  if (!(report.sup_series.back() < report.sup_series.front() * (1.0 - 1e-9))) {
    report.diagnostics.push_back("sup(ell) does not shrink across the family");
    ok = false;
  }
  const double cl_first = report.clifford_series.front();
  const double cl_last = report.clifford_series.back();
  if (cl_first > 1e-12 && !(cl_last < cl_first * (1.0 - 1e-9))) {
    report.diagnostics.push_back("||ell d(omega)||_Cl does not shrink across the family");
    ok = false;
  }
  if (!(report.alpha < report.threshold)) {
    std::ostringstream msg;
    msg << "gradient bound violated: alpha = " << report.alpha << " >= " << report.threshold
        << (mode == SectorLattice::Integers ? " (projectable mode)" : " (non-projectable mode)");
    report.diagnostics.push_back(msg.str());
    ok = false;
  }

  report.ok = ok;
  return report;
}

}  // namespace fiberspec
