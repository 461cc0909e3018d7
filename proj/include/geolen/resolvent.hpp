#pragma once

// (box + 1)^-1 on the surface, box = -y^2 (d_xx + d_yy) / 2, by integrating the
// free-space kernel (1/pi) Q1(cosh d) against automorphic data over H.

#include <vector>

#include "geolen/differentials.hpp"

namespace geolen {

/// Q1(x) = (x/2) log((x+1)/(x-1)) - 1 for x > 1.
double legendre_q1(double x);
/// Q1 at x = cosh d, accurate for small d.
double legendre_q1_cosh(double d);

struct GreenKernel {
  static constexpr double kappa = 0.3183098861837907;  // 1/pi
  double cutoff = 10.0;

  double operator()(double d) const;
  /// Kernel mass inside radius r: 1 + 2 F(cosh r), F' = Q1, F(1) = -1/2.
  static double mass_within(double r);
  static double tail_mass(double r);
};

/// kappa Q1(cosh d); NonPositiveDistance for d <= 0.
double free_kernel(double d);

struct ResolventOptions {
  double cutoff = 10.0;          // kernel cutoff R
  double near_spacing = 0.2;     // arc spacing of the near rule
  double far_spacing = 0.35;     // arc spacing of the far rule before capping
  int angular_cap = 256;         // max points per far ring
  int order = 6;                 // Gauss points per radial panel
  double tail_tol = 1e-3;        // CutoffTooSmall above this relative tail
};

struct ResolventValue {
  cplx value;
  double tail_bound;
};

/// Polar product rules around i, transported to each evaluation point by the
/// affine map w -> x + y w. The kernel is split with a smooth cutoff in
/// distance: the near part (d < 2) is integrated around z, the far part
/// (d > 1) around an anchor point.
class Resolvent {
 public:
  explicit Resolvent(ResolventOptions opts = {});

  ResolventValue apply(const SurfaceField& chi, cplx z) const { return apply_anchored(chi, z, z); }
  ResolventValue apply_anchored(const SurfaceField& chi, cplx z, cplx anchor) const;

  const ResolventOptions& options() const { return opts_; }
  std::size_t near_points() const { return near_.size(); }
  std::size_t far_points() const { return far_.size(); }

 private:
  struct RulePoint {
    cplx offset;    // point in H relative to the center i
    double weight;  // near: area weight times kernel times cutoff; far: area weight
  };
  ResolventOptions opts_;
  std::vector<RulePoint> near_;
  std::vector<RulePoint> far_;
};

/// Smooth cutoff equal to 1 for d <= 1 and 0 for d >= 2.
double near_cutoff(double d);

/// Convenience wrapper with default options; throws CutoffTooSmall.
cplx apply_resolvent(const SurfaceField& chi, const HPoint& z, const ResolventOptions& opts = {});

/// phi = (box + 1)^-1 chi sampled on `mesh`, with point and anchored evaluators.
SurfaceField resolve_field(const Resolvent& r, const QuadratureMesh& mesh, const SurfaceField& chi);

/// phi_{ij} for harmonic Beltrami differentials.
SurfaceField phi_field(const Resolvent& r, const QuadratureMesh& field_mesh, const QuadratureMesh& data_mesh,
                       const HarmonicBeltrami& ai, const HarmonicBeltrami& aj);

struct PdeReport {
  double max_relative = 0.0;
  double mean_relative = 0.0;
  std::vector<double> residuals;  // |box phi + phi - chi| / scale per probe
  double scale = 0.0;             // max |chi| over the probes
};

/// Fourth-order finite-difference check of (box + 1) phi = chi at the probes.
PdeReport verify_pde(const SurfaceField& phi, const SurfaceField& chi, const std::vector<cplx>& probes,
                     double step = 0.05);

/// Probe points: mesh nodes in the core (local chart height <= max_height).
std::vector<cplx> core_probes(const QuadratureMesh& mesh, std::size_t count, double max_height = 2.0);

/// min over mesh nodes within core_radius of the surface center of
/// phi(z) / int chi, where phi = (box + 1)^-1 chi for chi = |beta|^2.
double p1_empirical(const FuchsianSurface& s, const SurfaceField& phi, const SurfaceField& chi, double core_radius);

}  // namespace geolen
