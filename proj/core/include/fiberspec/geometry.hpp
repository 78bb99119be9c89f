#pragma once

#include <compare>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace fiberspec {

// Fiber length profile as a finite trigonometric polynomial over one base
// coordinate:
//   ell(x) = constant + sum_m [ cos_coeff_m * cos(2*pi*f_m*x/P)
//                             + sin_coeff_m * sin(2*pi*f_m*x/P) ]
// Finite coefficients keep extrema and gradients computable to machine
// precision.
struct FiberProfile {
  struct Harmonic {
    int frequency = 1;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
  };

  double base_period = 2.0 * std::numbers::pi;
  double constant = 1.0;
  std::vector<Harmonic> harmonics;

  double value(double x) const;
  double derivative(double x) const;
  int max_frequency() const;
  bool is_constant() const;

  FiberProfile scaled(double factor) const;          // factor * ell(x)
  FiberProfile phase_shifted(double shift) const;    // ell(x + shift)
  FiberProfile frequency_scaled(int factor) const;   // ell(factor * x)
};

struct ProfileFunctionals {
  double sup = 0.0;
  double min = 0.0;
  double grad_sup = 0.0;
};

// sup ell, min ell, sup |ell'|, by dense sampling plus golden-section
// refinement of every local extremum bracket. Throws std::invalid_argument
// if the profile is not strictly positive.
ProfileFunctionals profile_functionals(const FiberProfile& profile);

// Connection data of the circle bundle: holonomy of i*omega around each base
// generator (stored mod 2*pi) and d(omega) as a constant-coefficient 2-form
// on disjoint coordinate planes. euler_numbers records the flux quantum per
// base 2-cycle.
struct ConnectionData {
  struct CurvaturePlane {
    int axis_a = 0;
    int axis_b = 1;
    double coefficient = 0.0;
  };

  std::vector<double> holonomy;
  std::vector<CurvaturePlane> curvature;
  std::vector<long> euler_numbers;
};

// ||ell * d(omega)||_Cl: sup over base points of the sum of skew-eigenvalue
// magnitudes of the 2-form. For disjoint constant-coefficient planes this is
// sup(ell) * sum |coefficients|. Throws on overlapping plane pairs.
double clifford_norm(const ConnectionData& connection, const FiberProfile& profile);

enum class SectorLattice { Integers, HalfIntegers };

struct SpinStructureSpec {
  bool fiber_projectable = true;
  std::vector<double> base_twists;  // each in {0, 1/2}, one per base generator

  SectorLattice sector_lattice() const {
    return fiber_projectable ? SectorLattice::Integers : SectorLattice::HalfIntegers;
  }
};

// Fourier sector index k, stored as 2k so half-integer lattices are exact.
struct Sector {
  int twice = 0;

  double value() const { return 0.5 * twice; }
  bool is_integer() const { return twice % 2 == 0; }
  friend auto operator<=>(const Sector&, const Sector&) = default;
};

inline Sector sector_integer(int k) { return Sector{2 * k}; }
inline Sector sector_twice(int twice) { return Sector{twice}; }

// All lattice sectors with lo <= k <= hi, ascending.
std::vector<Sector> sectors_in_range(SectorLattice lattice, double lo, double hi);

struct CircleBase {
  double circumference = 2.0 * std::numbers::pi;
};

struct TorusBase {
  double period_x = 1.0;
  double period_y = 1.0;

  double area() const { return period_x * period_y; }
};

using BaseSpace = std::variant<CircleBase, TorusBase>;

// How the stored profile encodes the fiber size.
//   KillingNorm: ell(x) = |K|(x); the fiber circle has length 2*pi*ell(x).
//   FiberPeriod: ell(x) is the fiber circumference itself, |K| = ell/(2*pi).
// Flat-torus geometries are entered through their periods and use
// FiberPeriod; warped and flux geometries store |K| directly.
enum class FiberConvention { KillingNorm, FiberPeriod };

struct BundleGeometry {
  BaseSpace base;
  FiberProfile profile;
  ConnectionData connection;
  SpinStructureSpec spin;
  FiberConvention fiber_convention = FiberConvention::KillingNorm;

  int base_dimension() const;
  double base_circumference() const;  // circle bases only
  double killing_norm(double x) const;
  double killing_norm_constant() const;  // requires constant profile

  // Dimensional consistency, flux quantization, profile positivity.
  // Throws std::invalid_argument with the failing condition.
  void validate() const;
};

struct CollapseFamily {
  std::vector<BundleGeometry> stages;
  std::vector<int> stage_labels;
};

struct CollapseReport {
  double alpha = 0.0;
  double threshold = 1.0;  // 1 for projectable mode, 1/2 for non-projectable
  bool ok = false;
  std::vector<double> sup_series;
  std::vector<double> clifford_series;
  std::vector<std::string> diagnostics;
};

// Checks the collapse conditions over a finite family: sup ell and the
// Clifford norm must trend monotonically to zero and the gradient bound
// alpha (max of grad_sup over the tail half of the stages) must stay below
// 1 (projectable) or 1/2 (non-projectable). Throws std::invalid_argument on
// fewer than two stages or mismatched base/spin data.
CollapseReport validate_collapse_family(const CollapseFamily& family, SectorLattice mode);

// alpha estimate alone (tail-half max of grad_sup).
double collapse_alpha(const CollapseFamily& family);

}  // namespace fiberspec
