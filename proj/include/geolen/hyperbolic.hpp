#pragma once

// Upper half-plane geometry: Mobius actions, distances, element classification,
// standardized geodesic axes, and the fiber metric density g = 1/(2 y^2).

#include <array>
#include <cmath>
#include <complex>
#include <optional>

#include "geolen/error.hpp"

namespace geolen {

using cplx = std::complex<double>;

inline constexpr double kMatrixTol = 1e-12;
inline constexpr double kIdentityTol = 1e-10;

/// Point of the upper half-plane. Construction rejects y <= 0.
class HPoint {
 public:
  HPoint(double x, double y);
  explicit HPoint(cplx z) : HPoint(z.real(), z.imag()) {}

  double x() const { return x_; }
  double y() const { return y_; }
  cplx z() const { return {x_, y_}; }

 private:
  double x_;
  double y_;
};

/// Real 2x2 matrix with unit determinant acting by z -> (az+b)/(cz+d).
class MobiusTransform {
 public:
  /// Throws ValidationError when |ad - bc - 1| > det_tol.
  MobiusTransform(double a, double b, double c, double d, double det_tol = kMatrixTol);

  static MobiusTransform identity() { return {1.0, 0.0, 0.0, 1.0}; }
  /// Rescales an arbitrary matrix with positive determinant to unit determinant.
  static MobiusTransform normalized(double a, double b, double c, double d);
  /// Translation by classical distance t along the imaginary axis.
  static MobiusTransform dilation(double t);

  double a() const { return m_[0]; }
  double b() const { return m_[1]; }
  double c() const { return m_[2]; }
  double d() const { return m_[3]; }
  double trace() const { return m_[0] + m_[3]; }
  double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

  MobiusTransform inverse() const { return unchecked(m_[3], -m_[1], -m_[2], m_[0]); }
  /// Skips the determinant check; for products of already-validated elements.
  static MobiusTransform unchecked(double a, double b, double c, double d);
  MobiusTransform operator*(const MobiusTransform& o) const;

  cplx apply(cplx z) const { return (m_[0] * z + m_[1]) / (m_[2] * z + m_[3]); }
  /// Complex derivative (cz+d)^{-2}.
  cplx derivative(cplx z) const {
    const cplx den = m_[2] * z + m_[3];
    return 1.0 / (den * den);
  }

  /// Entrywise equality up to overall sign.
  bool projectively_equal(const MobiusTransform& o, double tol = kMatrixTol) const;
  bool is_identity(double tol = kIdentityTol) const;

  const std::array<double, 4>& entries() const { return m_; }

 private:
  std::array<double, 4> m_;
};

HPoint mobius_apply(const MobiusTransform& m, const HPoint& p);

/// Classical distance: cosh d = 1 + |z - w|^2 / (2 Im z Im w).
double hyp_distance(const HPoint& p, const HPoint& q);
/// cosh of the classical distance, avoiding arccosh round-off for close points.
double cosh_distance(cplx z, cplx w);

enum class ElementKind { Elliptic, Parabolic, Hyperbolic };

struct Classification {
  ElementKind kind;
  double classical_length;  // 2 arccosh(|tr|/2) for hyperbolic, else 0
};

Classification classify_and_length(const MobiusTransform& m, double band = 1e-10);

/// Which norm defines unit speed and length: g|u'|^2 = 1 (hermitian) or 2g|u'|^2 = 1
/// (riemannian, i.e. classical arclength).
enum class NormConvention { Hermitian, Riemannian };

/// Ratio between the convention length and the classical trace length.
double convention_factor(NormConvention c);

/// Fixed-point geometry of a hyperbolic element. `standardize` maps the
/// imaginary axis onto the axis, with S^{-1} m S = diag(e^{L/2}, e^{-L/2}).
struct GeodesicAxis {
  MobiusTransform element;
  MobiusTransform standardize;
  double classical_length;
  std::optional<double> repelling;   // nullopt = infinity
  std::optional<double> attracting;  // nullopt = infinity

  double period(NormConvention c) const { return classical_length * convention_factor(c); }
};

GeodesicAxis axis_standardize(const MobiusTransform& m);

struct AxisSample {
  HPoint point;
  cplx velocity;
};

/// Constant-speed parametrization of the axis, moving toward the attracting
/// fixed point, normalized to unit speed in the chosen convention.
AxisSample unit_speed_point(const GeodesicAxis& axis, double t, NormConvention c);

/// The fiber metric density g(z) = 1/(2y^2) and its derived quantities.
struct MetricDensity {
  static double g(const HPoint& p) { return 0.5 / (p.y() * p.y()); }
  static double log_g(const HPoint& p) { return -std::log(2.0) - 2.0 * std::log(p.y()); }
  /// Gamma = d/dz log g = i / y.
  static cplx christoffel(const HPoint& p) { return cplx(0.0, 1.0 / p.y()); }
  /// Analytic value of d_z d_zbar log g - g.
  static double curvature_defect(const HPoint& p);
};

}  // namespace geolen
