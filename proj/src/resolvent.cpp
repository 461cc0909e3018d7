#include "geolen/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geolen/numerics.hpp"

namespace geolen {

namespace {

constexpr double kPi = std::numbers::pi;

// Q1 as a function of x - 1 (accurate near the diagonal) or of 1/x (far away).
double q1_from_xm1(double xm1) {
  const double x = 1.0 + xm1;
  if (x > 8.0) {
    const double u = 1.0 / x;
    const double u2 = u * u;
    double term = u2, sum = 0.0;
    for (int k = 1; k < 40; ++k) {
      sum += term / (2.0 * k + 1.0);
      term *= u2;
      if (term < 1e-18 * sum) break;
    }
    return sum;
  }
  return 0.5 * x * std::log1p(2.0 / xm1) - 1.0;
}

// F(x) = ((x^2 - 1)/4) log((x+1)/(x-1)) - x/2; returns -2 F(cosh r).
double tail_from_cosh(double x) {
  if (x > 8.0) {
    const double u = 1.0 / x;
    const double u2 = u * u;
    double term = u, sum = 0.0;
    for (int k = 1; k < 40; ++k) {
      sum += term / (4.0 * k * k - 1.0);
      term *= u2;
      if (term < 1e-18 * sum) break;
    }
    return 2.0 * sum;
  }
  const double f = 0.25 * (x * x - 1.0) * std::log((x + 1.0) / (x - 1.0)) - 0.5 * x;
  return -2.0 * f;
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

struct RadialNode {
  double r;
  double w;
};

std::vector<RadialNode> radial_nodes(const std::vector<double>& breaks, int order) {
  std::vector<RadialNode> out;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const auto rule = gauss_legendre(order, breaks[p], breaks[p + 1]);
    for (int k = 0; k < order; ++k) out.push_back({rule.nodes[k], rule.weights[k]});
  }
  return out;
}

cplx polar_offset(double r, double theta) {
  const cplx p = std::tanh(0.5 * r) * std::exp(cplx(0.0, theta));
  return cplx(0.0, 1.0) * (1.0 + p) / (1.0 - p);
}

struct FieldStats {
  cplx mean;
  double max_dev;
};

FieldStats field_stats(const SurfaceField& chi) {
  if (chi.mesh == nullptr || chi.values.empty()) return {0.0, 0.0};
  const cplx mean = chi.integral() / chi.mesh->total_weight();
  double dev = 0.0;
  for (const auto& v : chi.values) dev = std::max(dev, std::abs(v - mean));
  return {mean, dev};
}

}  // namespace

double legendre_q1(double x) {
  if (!(x > 1.0)) throw Error(ErrorCode::NonPositiveDistance, "Q1 needs x > 1");
  return q1_from_xm1(x - 1.0);
}

double legendre_q1_cosh(double d) {
  if (!(d > 0.0)) throw Error(ErrorCode::NonPositiveDistance, "distance must be positive");
  const double s = std::sinh(0.5 * d);
  return q1_from_xm1(2.0 * s * s);
}

double GreenKernel::operator()(double d) const { return kappa * legendre_q1_cosh(d); }

double GreenKernel::tail_mass(double r) { return tail_from_cosh(std::cosh(r)); }

double GreenKernel::mass_within(double r) { return 1.0 - tail_mass(r); }

double free_kernel(double d) { return GreenKernel{}(d); }

double near_cutoff(double d) { return 1.0 - smooth_step(d - 1.0); }

Resolvent::Resolvent(ResolventOptions opts) : opts_(opts) {
  if (!(opts_.cutoff > 2.5)) throw Error(ErrorCode::CutoffTooSmall, "kernel cutoff must exceed 2.5");
  const double phase = 0.5 * (std::sqrt(5.0) - 1.0);
  int ring = 0;

  const std::vector<double> near_breaks{0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.04, 0.1, 0.2, 0.35,
                                        0.5, 0.75, 1.0,  1.2,  1.4,  1.6,  1.8,  2.0};
  for (const auto& [r, wr] : radial_nodes(near_breaks, opts_.order)) {
    const int n = std::max(16, static_cast<int>(std::ceil(2.0 * kPi * std::sinh(r) / opts_.near_spacing)));
    const double k = GreenKernel::kappa * legendre_q1_cosh(r) * near_cutoff(r);
    const double off = std::fmod(phase * ring++, 1.0);
    for (int j = 0; j < n; ++j) {
      const double theta = 2.0 * kPi * (j + off) / n;
      near_.push_back({polar_offset(r, theta), wr * std::sinh(r) * 2.0 * kPi / n * k});
    }
  }

  std::vector<double> far_breaks{1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
  for (double b = 3.0; b < opts_.cutoff; b += 1.0) far_breaks.push_back(b);
  far_breaks.push_back(opts_.cutoff);
  for (const auto& [r, wr] : radial_nodes(far_breaks, opts_.order)) {
    const int want = static_cast<int>(std::ceil(2.0 * kPi * std::sinh(r) / opts_.far_spacing));
    const int n = std::clamp(want, 16, opts_.angular_cap);
    const double off = std::fmod(phase * ring++, 1.0);
    for (int j = 0; j < n; ++j) {
      const double theta = 2.0 * kPi * (j + off) / n;
      far_.push_back({polar_offset(r, theta), wr * std::sinh(r) * 2.0 * kPi / n});
    }
  }
}

ResolventValue Resolvent::apply_anchored(const SurfaceField& chi, cplx z, cplx anchor) const {
  const double cosh1 = std::cosh(1.0), cosh2 = std::cosh(2.0);
  std::vector<cplx> terms(near_.size() + far_.size(), 0.0);
  for (std::size_t k = 0; k < near_.size(); ++k) {
    const cplx p(z.real() + z.imag() * near_[k].offset.real(), z.imag() * near_[k].offset.imag());
    terms[k] = near_[k].weight * chi.eval(p);
  }
  const double zy = z.imag();
  for (std::size_t k = 0; k < far_.size(); ++k) {
    const cplx p(anchor.real() + anchor.imag() * far_[k].offset.real(), anchor.imag() * far_[k].offset.imag());
    const double xm1 = std::norm(z - p) / (2.0 * zy * p.imag());
    const double x = 1.0 + xm1;
    if (x <= cosh1) continue;
    double w = far_[k].weight * GreenKernel::kappa * q1_from_xm1(xm1);
    if (x < cosh2) w *= 1.0 - near_cutoff(std::acosh(x));
    terms[near_.size() + k] = w * chi.eval(p);
  }
  const auto stats = field_stats(chi);
  const double tail = GreenKernel::tail_mass(opts_.cutoff);
  return {pairwise_sum(terms) + tail * stats.mean, tail * stats.max_dev};
}

cplx apply_resolvent(const SurfaceField& chi, const HPoint& z, const ResolventOptions& opts) {
  const Resolvent r(opts);
  const auto v = r.apply(chi, z.z());
  if (v.tail_bound > opts.tail_tol * std::max(std::abs(v.value), 1e-300)) {
    throw Error(ErrorCode::CutoffTooSmall, "kernel cutoff " + std::to_string(opts.cutoff) + " leaves tail bound " +
                                               std::to_string(v.tail_bound));
  }
  return v.value;
}

SurfaceField resolve_field(const Resolvent& r, const QuadratureMesh& mesh, const SurfaceField& chi) {
  auto rp = std::make_shared<const Resolvent>(r);
  auto cp = std::make_shared<const SurfaceField>(chi);
  SurfaceField out;
  out.mesh = &mesh;
  out.values.resize(mesh.nodes.size());
  parallel_for(mesh.nodes.size(),
               [&](std::size_t i) { out.values[i] = rp->apply(*cp, mesh.nodes[i].point.z()).value; });
  out.eval = [rp, cp](cplx z) { return rp->apply(*cp, z).value; };
  out.eval_anchored = [rp, cp](cplx z, cplx a) { return rp->apply_anchored(*cp, z, a).value; };
  return out;
}

SurfaceField phi_field(const Resolvent& r, const QuadratureMesh& field_mesh, const QuadratureMesh& data_mesh,
                       const HarmonicBeltrami& ai, const HarmonicBeltrami& aj) {
  if (ai.is_zero() || aj.is_zero()) return constant_field(field_mesh, 0.0);
  return resolve_field(r, field_mesh, pointwise_product(data_mesh, ai, aj));
}

PdeReport verify_pde(const SurfaceField& phi, const SurfaceField& chi, const std::vector<cplx>& probes, double step) {
  PdeReport rep;
  rep.residuals.resize(probes.size());
  std::vector<double> raw(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    const cplx z = probes[i];
    const double h = step * z.imag();
    auto f = [&](cplx p) { return phi.eval_anchored ? phi.eval_anchored(p, z) : phi.eval(p); };
    const cplx c = f(z);
    auto second = [&](cplx dir) {
      return (-f(z + 2.0 * h * dir) + 16.0 * f(z + h * dir) - 30.0 * c + 16.0 * f(z - h * dir) -
              f(z - 2.0 * h * dir)) /
             (12.0 * h * h);
    };
    const cplx lap = second(1.0) + second(cplx(0.0, 1.0));
    const cplx box = -0.5 * z.imag() * z.imag() * lap;
    raw[i] = std::abs(box + c - chi.eval(z));
  });
  for (const auto& z : probes) rep.scale = std::max(rep.scale, std::abs(chi.eval(z)));
  const double scale = rep.scale > 0.0 ? rep.scale : 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    rep.residuals[i] = raw[i] / scale;
    rep.max_relative = std::max(rep.max_relative, rep.residuals[i]);
    sum += rep.residuals[i];
  }
  rep.mean_relative = probes.empty() ? 0.0 : sum / static_cast<double>(probes.size());
  return rep;
}

std::vector<cplx> core_probes(const QuadratureMesh& mesh, std::size_t count, double max_height) {
  std::vector<cplx> core;
  for (const auto& n : mesh.nodes) {
    if (n.local_height <= max_height) core.push_back(n.point.z());
  }
  if (core.size() <= count) return core;
  std::vector<cplx> out;
  const double stride = static_cast<double>(core.size()) / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(core[static_cast<std::size_t>(k * stride)]);
  return out;
}

double p1_empirical(const FuchsianSurface& s, const SurfaceField& phi, const SurfaceField& chi, double core_radius) {
  const double total = chi.integral().real();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.values.size(); ++i) {
    const auto& p = phi.mesh->nodes[i].point;
    if (hyp_distance(p, s.center()) <= core_radius) best = std::min(best, phi.values[i].real() / total);
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::ValidationError, "core region contains no mesh nodes");
  return best;
}

}  // namespace geolen
