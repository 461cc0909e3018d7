#pragma once

// Periodic functions along closed geodesics and the spectral line operators
// (-d^2/dt^2 + c)^-1 and M = (L - L^-1)^-1 (-d^2/dt^2), L = -d^2/dt^2 + 1.

#include <vector>

#include "geolen/differentials.hpp"

namespace geolen {

/// Samples at t_k = k * period / N, N a power of two >= 64.
struct PeriodicFunction {
  double period = 1.0;
  std::vector<cplx> samples;

  PeriodicFunction() = default;
  PeriodicFunction(double period, std::vector<cplx> samples);

  std::size_t size() const { return samples.size(); }
  static PeriodicFunction constant(double period, std::size_t n, cplx c);
  /// exp(2 pi i nu t / period) scaled by amp.
  static PeriodicFunction mode(double period, std::size_t n, int nu, cplx amp = 1.0);
};

PeriodicFunction operator+(const PeriodicFunction& f, const PeriodicFunction& g);
PeriodicFunction operator-(const PeriodicFunction& f, const PeriodicFunction& g);
PeriodicFunction operator*(cplx c, const PeriodicFunction& f);

struct SpectralDiagnostics {
  std::vector<double> eigenvalues;  // (2 pi nu / period)^2, nu = 0..N/2
  std::vector<double> multipliers;  // applied per nu
};

/// Smallest power of two >= max(256, 64 * length).
std::size_t default_samples(double length);

/// Discrete Fourier coefficients f_nu (so f = sum f_nu e^{2 pi i nu t / period}),
/// index k holds nu = k for k <= N/2 and nu = k - N above.
std::vector<cplx> fourier_coefficients(const PeriodicFunction& f);
PeriodicFunction from_coefficients(double period, const std::vector<cplx>& coeffs);
int mode_index(std::size_t k, std::size_t n);

/// a(t) = A_{zbar zbar}(u(t)) conj(u'(t))^2 with unit speed in the convention.
PeriodicFunction restrict_to_geodesic(const HarmonicBeltrami& a, const ClosedGeodesic& g, std::size_t n,
                                      NormConvention c);
/// |a(period) - a(0)| from one extra sample past the seam.
double seam_mismatch(const HarmonicBeltrami& a, const ClosedGeodesic& g, std::size_t n, NormConvention c);

/// Periodic trapezoid rule.
cplx geodesic_integral(const PeriodicFunction& f);
/// int f conj(g) dt.
cplx geodesic_inner(const PeriodicFunction& f, const PeriodicFunction& g);

PeriodicFunction line_resolvent(const PeriodicFunction& f, double c, SpectralDiagnostics* diag = nullptr);
/// Forward operator (-d^2/dt^2 + c) by spectral differentiation.
PeriodicFunction line_operator(const PeriodicFunction& f, double c);

/// Multiplier route: sum_{nu != 0} (1 - 1/(2 + lambda_nu)) f_nu.
PeriodicFunction m_operator(const PeriodicFunction& f, SpectralDiagnostics* diag = nullptr);
/// Identity route: g - (2 - d^2/dt^2)^-1 g on the mean-free part g of f.
PeriodicFunction m_operator_identity(const PeriodicFunction& f);

struct Prop73Report {
  double lhs = 0.0;
  double mid = 0.0;        // Re int M(f) conj(f)
  double mid_imag = 0.0;
  double rhs = 0.0;        // (1/2)(int |f|^2 - |int f|^2 / period)
  bool pass = false;       // 0 <= mid <= rhs + 1e-10
  double variance = 0.0;   // int |f|^2 - |int f|^2 / period
  bool sandwich_pass = false;  // variance / 2 <= mid <= variance (within 1e-10)
};
Prop73Report prop73_report(const PeriodicFunction& f);

}  // namespace geolen
