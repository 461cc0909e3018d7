#pragma once

// Real Fenchel-Nielsen families of punctured tori, collar twist Beltrami
// coefficients and finite-difference derivatives of geodesic length.

#include <memory>
#include <string>
#include <vector>

#include "geolen/variation.hpp"

namespace geolen {

enum class FnDirection { Length, Twist };

std::string_view to_string(FnDirection d);

/// One-parameter family through (length, twist) moving one FN coordinate.
struct FnFamily {
  double length = 1.0;
  double twist = 0.0;
  FnDirection direction = FnDirection::Twist;
  double h0 = 0.0;  // 0 selects 1e-3 max(1, length)
  NormConvention convention = NormConvention::Riemannian;

  double base_step() const;
  std::vector<double> steps() const;  // h0, h0/2, h0/4
  /// Raw generators at parameter offset t along the direction; ValidationError
  /// unless the commutator trace is -2.
  GeneratorPair generators(double t) const;
  /// Member surfaces at +-h for every step, built in parallel (order +h0, -h0, +h0/2, ...).
  std::vector<std::shared_ptr<const FuchsianSurface>> member_surfaces(const SurfaceOptions& opts = {}) const;
  FuchsianSurface base_surface(const SurfaceOptions& opts = {}) const;
};

/// Twist of the pair along the axis of one generator by classical distance t.
/// In the standardized frame of that axis the half Re w > 0 moves by e^t
/// relative to Re w < 0, matching the sign of twist_beltrami.
GeneratorPair twist_pair(const GeneratorPair& g, bool along_a, double t);

enum class Ramp { Smooth, Cosine, None };

std::string_view to_string(Ramp r);

/// Collar half-width bound asinh(1 / sinh(l / 2)) for classical length l.
double collar_bound(double classical_length);

struct TwistBeltrami {
  BeltramiSample sample;
  double half_width = 0.0;
  double collar_bound = 0.0;
  double rate = 1.0;
  Ramp ramp = Ramp::Smooth;
  std::size_t lifts = 0;  // coset representatives scanned on the mesh
};

struct TwistOptions {
  Ramp ramp = Ramp::Smooth;
  double rate = 1.0;
  int rho_samples = 64;
  int delta_panels = 16;
};

/// Shear of unit classical twist rate across the collar of `alpha`, sampled on
/// `mesh` and paired exactly with quadratic differentials. CollarTooWide when
/// the half-width is not below the collar bound.
TwistBeltrami twist_beltrami(const FuchsianSurface& s, const ClosedGeodesic& alpha, double half_width,
                             const QuadratureMesh& mesh, const TwistOptions& opts = {});

/// Default collar half-width: 40% of the collar bound.
double default_half_width(double classical_length);

/// ca a + cb b on a common mesh; exact pairings combine linearly.
BeltramiSample combine(const BeltramiSample& a, cplx ca, const BeltramiSample& b, cplx cb);

struct FdResult {
  double d1 = 0.0;
  double order_estimate = 0.0;  // NaN when the differences are at rounding level
  std::vector<double> central;  // central differences at h0, h0/2, h0/4
};

/// Richardson-extrapolated derivative of the convention length of the word;
/// NonconvergentFD when the two extrapolants disagree by more than 1e-3 relative.
FdResult fd_length_derivative(const FnFamily& family, const Word& word);

/// Derivatives of (length, twist) of A under the twist along B, from traces.
struct CrossTwist {
  double dlength = 0.0;
  double dtwist = 0.0;
};
CrossTwist cross_twist_rates(const FnFamily& family);

/// Beltrami sample representing the family direction on its base surface.
/// Twist: the collar shear along A. Length: (t_B - k t_A) / m from the cross
/// twist rates.
BeltramiSample direction_beltrami(const FnFamily& family, const FuchsianSurface& base, const QuadratureMesh& mesh,
                                  const TwistOptions& opts = {});

struct GardinerReport {
  std::string word;
  NormConvention convention = NormConvention::Riemannian;
  double formula = 0.0;  // 2 Re(first variation)
  double fd = 0.0;
  double order_estimate = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  bool vanishing = false;
  bool pass = false;
};

/// Compares 2 Re(first variation) with the finite-difference oracle.
/// Passes with relative error < rel_tol, or both sides below abs_tol.
GardinerReport gardiner_check(const FnFamily& family, const Word& word, const HarmonicBeltrami& direction,
                              VariationEngine& engine, const FuchsianSurface& base, double rel_tol = 1e-3,
                              double abs_tol = 1e-6);

}  // namespace geolen
