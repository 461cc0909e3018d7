#include "geolen/geodesic_ops.hpp"

#include <fftw3.h>

#include <bit>
#include <mutex>
#include <numbers>

#include "geolen/numerics.hpp"

namespace geolen {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<cplx> transform(const std::vector<cplx>& in, int sign) {
  const int n = static_cast<int>(in.size());
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  }
  for (int k = 0; k < n; ++k) {
    buf[k][0] = in[k].real();
    buf[k][1] = in[k].imag();
  }
  fftw_execute(plan);
  std::vector<cplx> out(n);
  for (int k = 0; k < n; ++k) out[k] = cplx(buf[k][0], buf[k][1]);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

double eigenvalue(double period, int nu) {
  const double k = kTwoPi * nu / period;
  return k * k;
}

template <typename F>
PeriodicFunction apply_multiplier(const PeriodicFunction& f, F multiplier, SpectralDiagnostics* diag) {
  auto coeffs = fourier_coefficients(f);
  const std::size_t n = coeffs.size();
  for (std::size_t k = 0; k < n; ++k) coeffs[k] *= multiplier(mode_index(k, n));
  if (diag != nullptr) {
    diag->eigenvalues.clear();
    diag->multipliers.clear();
    for (std::size_t nu = 0; nu <= n / 2; ++nu) {
      diag->eigenvalues.push_back(eigenvalue(f.period, static_cast<int>(nu)));
      diag->multipliers.push_back(multiplier(static_cast<int>(nu)));
    }
  }
  return from_coefficients(f.period, coeffs);
}

}  // namespace

PeriodicFunction::PeriodicFunction(double period_, std::vector<cplx> samples_)
    : period(period_), samples(std::move(samples_)) {
  if (!(period > 0.0)) throw Error(ErrorCode::NonPositiveLength, "period must be positive");
  if (samples.size() < 64 || !std::has_single_bit(samples.size())) {
    throw Error(ErrorCode::ValidationError, "sample count must be a power of two >= 64");
  }
}

PeriodicFunction PeriodicFunction::constant(double period, std::size_t n, cplx c) {
  return {period, std::vector<cplx>(n, c)};
}

PeriodicFunction PeriodicFunction::mode(double period, std::size_t n, int nu, cplx amp) {
  std::vector<cplx> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = amp * std::exp(cplx(0.0, kTwoPi * nu * static_cast<double>(k) / static_cast<double>(n)));
  }
  return {period, std::move(s)};
}

PeriodicFunction operator+(const PeriodicFunction& f, const PeriodicFunction& g) {
  if (f.size() != g.size()) throw Error(ErrorCode::DimensionMismatch, "sample count mismatch");
  auto out = f;
  for (std::size_t k = 0; k < f.size(); ++k) out.samples[k] += g.samples[k];
  return out;
}

PeriodicFunction operator-(const PeriodicFunction& f, const PeriodicFunction& g) { return f + cplx(-1.0) * g; }

PeriodicFunction operator*(cplx c, const PeriodicFunction& f) {
  auto out = f;
  for (auto& v : out.samples) v *= c;
  return out;
}

std::size_t default_samples(double length) {
  const double want = std::max(256.0, 64.0 * length);
  return std::bit_ceil(static_cast<std::size_t>(std::ceil(want)));
}

int mode_index(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<int>(k) : static_cast<int>(k) - static_cast<int>(n);
}

std::vector<cplx> fourier_coefficients(const PeriodicFunction& f) {
  auto c = transform(f.samples, FFTW_FORWARD);
  const double inv = 1.0 / static_cast<double>(c.size());
  for (auto& v : c) v *= inv;
  return c;
}

PeriodicFunction from_coefficients(double period, const std::vector<cplx>& coeffs) {
  return {period, transform(coeffs, FFTW_BACKWARD)};
}

PeriodicFunction restrict_to_geodesic(const HarmonicBeltrami& a, const ClosedGeodesic& g, std::size_t n,
                                      NormConvention c) {
  const double period = g.length(c);
  std::vector<cplx> s(n);
  parallel_for(n, [&](std::size_t k) {
    const auto p = unit_speed_point(g.axis, period * static_cast<double>(k) / static_cast<double>(n), c);
    const cplx v = std::conj(p.velocity);
    s[k] = a.lowered(p.point.z()) * v * v;
  });
  return {period, std::move(s)};
}

double seam_mismatch(const HarmonicBeltrami& a, const ClosedGeodesic& g, std::size_t, NormConvention c) {
  auto at = [&](double t) {
    const auto p = unit_speed_point(g.axis, t, c);
    const cplx v = std::conj(p.velocity);
    return a.lowered(p.point.z()) * v * v;
  };
  return std::abs(at(g.length(c)) - at(0.0));
}

cplx geodesic_integral(const PeriodicFunction& f) {
  return pairwise_sum(f.samples) * (f.period / static_cast<double>(f.size()));
}

cplx geodesic_inner(const PeriodicFunction& f, const PeriodicFunction& g) {
  if (f.size() != g.size()) throw Error(ErrorCode::DimensionMismatch, "sample count mismatch");
  std::vector<cplx> p(f.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = f.samples[k] * std::conj(g.samples[k]);
  return pairwise_sum(p) * (f.period / static_cast<double>(f.size()));
}

PeriodicFunction line_resolvent(const PeriodicFunction& f, double c, SpectralDiagnostics* diag) {
  if (!(c > 0.0)) throw Error(ErrorCode::ValidationError, "resolvent shift must be positive");
  return apply_multiplier(f, [&](int nu) { return 1.0 / (c + eigenvalue(f.period, nu)); }, diag);
}

PeriodicFunction line_operator(const PeriodicFunction& f, double c) {
  return apply_multiplier(f, [&](int nu) { return c + eigenvalue(f.period, nu); }, nullptr);
}

PeriodicFunction m_operator(const PeriodicFunction& f, SpectralDiagnostics* diag) {
  return apply_multiplier(
      f, [&](int nu) { return nu == 0 ? 0.0 : 1.0 - 1.0 / (2.0 + eigenvalue(f.period, nu)); }, diag);
}

PeriodicFunction m_operator_identity(const PeriodicFunction& f) {
  const cplx mean = geodesic_integral(f) / f.period;
  const auto g = f - PeriodicFunction::constant(f.period, f.size(), mean);
  return g - line_resolvent(g, 2.0);
}

Prop73Report prop73_report(const PeriodicFunction& f) {
  Prop73Report r;
  const cplx mid = geodesic_inner(m_operator(f), f);
  r.mid = mid.real();
  r.mid_imag = mid.imag();
  const double energy = geodesic_inner(f, f).real();
  const double mean_part = std::norm(geodesic_integral(f)) / f.period;
  r.variance = energy - mean_part;
  r.rhs = 0.5 * r.variance;
  constexpr double kTol = 1e-10;
  r.pass = r.mid >= r.lhs - kTol && r.mid <= r.rhs + kTol;
  r.sandwich_pass = r.mid >= 0.5 * r.variance - kTol && r.mid <= r.variance + kTol;
  return r;
}

}  // namespace geolen
