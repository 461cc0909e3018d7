#include "geolen/hyperbolic.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace geolen {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IdentityElement: return "IdentityElement";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::DegenerateLength: return "DegenerateLength";
    case ErrorCode::CacheOverflow: return "CacheOverflow";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CollarTooWide: return "CollarTooWide";
    case ErrorCode::NonconvergentFD: return "NonconvergentFD";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

HPoint::HPoint(double x, double y) : x_(x), y_(y) {
  if (!(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
    std::ostringstream os;
    os << "point (" << x << ", " << y << ") is not in the upper half-plane";
    throw Error(ErrorCode::InvalidPoint, os.str());
  }
}

MobiusTransform::MobiusTransform(double a, double b, double c, double d, double det_tol)
    : m_{a, b, c, d} {
  if (std::abs(det() - 1.0) > det_tol) {
    std::ostringstream os;
    os << "determinant " << det() << " differs from 1";
    throw Error(ErrorCode::ValidationError, os.str());
  }
}

MobiusTransform MobiusTransform::unchecked(double a, double b, double c, double d) {
  MobiusTransform m = identity();
  m.m_ = {a, b, c, d};
  return m;
}

MobiusTransform MobiusTransform::normalized(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!(det > 0.0)) throw Error(ErrorCode::ValidationError, "matrix determinant must be positive");
  const double s = 1.0 / std::sqrt(det);
  return unchecked(a * s, b * s, c * s, d * s);
}

MobiusTransform MobiusTransform::dilation(double t) {
  return unchecked(std::exp(0.5 * t), 0.0, 0.0, std::exp(-0.5 * t));
}

MobiusTransform MobiusTransform::operator*(const MobiusTransform& o) const {
  const auto& p = m_;
  const auto& q = o.m_;
  double a = p[0] * q[0] + p[1] * q[2];
  double b = p[0] * q[1] + p[1] * q[3];
  double c = p[2] * q[0] + p[3] * q[2];
  double d = p[2] * q[1] + p[3] * q[3];
  // Re-project onto SL2 so long words keep unit determinant.
  const double s = 1.0 / std::sqrt(a * d - b * c);
  return unchecked(a * s, b * s, c * s, d * s);
}

bool MobiusTransform::projectively_equal(const MobiusTransform& o, double tol) const {
  double plus = 0.0, minus = 0.0;
  for (int k = 0; k < 4; ++k) {
    plus = std::max(plus, std::abs(m_[k] - o.m_[k]));
    minus = std::max(minus, std::abs(m_[k] + o.m_[k]));
  }
  return std::min(plus, minus) <= tol;
}

bool MobiusTransform::is_identity(double tol) const {
  return projectively_equal(identity(), tol);
}

HPoint mobius_apply(const MobiusTransform& m, const HPoint& p) {
  const cplx w = m.apply(p.z());
  // Im(w) = y / |cz+d|^2 exactly; use it to avoid cancellation.
  const double den = std::norm(m.c() * p.z() + m.d());
  return HPoint(w.real(), p.y() / den);
}

double cosh_distance(cplx z, cplx w) {
  return 1.0 + std::norm(z - w) / (2.0 * z.imag() * w.imag());
}

double hyp_distance(const HPoint& p, const HPoint& q) {
  // 2 asinh(|z-w| / (2 sqrt(y1 y2))) is accurate for nearby points.
  const double r = std::abs(p.z() - q.z()) / (2.0 * std::sqrt(p.y() * q.y()));
  return 2.0 * std::asinh(r);
}

Classification classify_and_length(const MobiusTransform& m, double band) {
  if (m.is_identity()) throw Error(ErrorCode::IdentityElement, "classification of +-identity");
  const double t = std::abs(m.trace());
  if (t > 2.0 + band) return {ElementKind::Hyperbolic, 2.0 * std::acosh(0.5 * t)};
  if (t < 2.0 - band) return {ElementKind::Elliptic, 0.0};
  return {ElementKind::Parabolic, 0.0};
}

double convention_factor(NormConvention c) {
  return c == NormConvention::Hermitian ? 1.0 / std::numbers::sqrt2 : 1.0;
}

namespace {

// Eigenvector of m for eigenvalue lambda, as a projective column (p, q).
std::array<double, 2> eigenvector(const MobiusTransform& m, double lambda) {
  const std::array<double, 2> v1{m.b(), lambda - m.a()};
  const std::array<double, 2> v2{lambda - m.d(), m.c()};
  const double n1 = std::hypot(v1[0], v1[1]);
  const double n2 = std::hypot(v2[0], v2[1]);
  const auto& v = n1 >= n2 ? v1 : v2;
  const double n = std::max(n1, n2);
  return {v[0] / n, v[1] / n};
}

std::optional<double> boundary_point(const std::array<double, 2>& v) {
  if (std::abs(v[1]) < 1e-300) return std::nullopt;
  return v[0] / v[1];
}

}  // namespace

GeodesicAxis axis_standardize(const MobiusTransform& m0) {
  const auto cls = classify_and_length(m0);
  if (cls.kind != ElementKind::Hyperbolic) {
    throw Error(ErrorCode::NotHyperbolic, "axis requested for a non-hyperbolic element");
  }
  // Work with the positive-trace representative.
  MobiusTransform m = m0.trace() > 0 ? m0 : MobiusTransform::unchecked(-m0.a(), -m0.b(), -m0.c(), -m0.d());
  const double half = 0.5 * m.trace();
  const double lam = half + std::sqrt(half * half - 1.0);
  auto vplus = eigenvector(m, lam);
  auto vminus = eigenvector(m, 1.0 / lam);
  double det = vplus[0] * vminus[1] - vminus[0] * vplus[1];
  if (det < 0) {
    vminus = {-vminus[0], -vminus[1]};
    det = -det;
  }
  const double s = 1.0 / std::sqrt(det);
  const auto S = MobiusTransform::unchecked(vplus[0] * s, vminus[0] * s, vplus[1] * s, vminus[1] * s);
  return GeodesicAxis{m0, S, cls.classical_length, boundary_point(vminus), boundary_point(vplus)};
}

AxisSample unit_speed_point(const GeodesicAxis& axis, double t, NormConvention c) {
  // Riemannian unit speed along i e^{s}; hermitian speed is sqrt(2) times faster in s.
  const double rate = 1.0 / convention_factor(c);
  const cplx w(0.0, std::exp(rate * t));
  const cplx dw = w * rate;
  const cplx z = axis.standardize.apply(w);
  const cplx vel = axis.standardize.derivative(w) * dw;
  return {HPoint(z.real(), std::max(z.imag(), 1e-300)), vel};
}

double MetricDensity::curvature_defect(const HPoint& p) {
  // log g = -log 2 - 2 log y, so d_z d_zbar log g = (1/4) Laplacian = 1/(2 y^2) = g.
  const double y = p.y();
  return 0.5 / (y * y) - g(p);
}

}  // namespace geolen
