#include "geolen/family.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "geolen/numerics.hpp"

namespace geolen {

namespace {

constexpr double kPi = std::numbers::pi;

MobiusTransform word_element(const GeneratorPair& g, const Word& w) {
  const std::array<MobiusTransform, 4> gens{g.a, g.b, g.a.inverse(), g.b.inverse()};
  auto m = MobiusTransform::identity();
  for (auto l : w.letters()) m = m * gens[l];
  return m;
}

double word_length(const GeneratorPair& g, const Word& w, NormConvention c) {
  const double t = std::abs(word_element(g, w).trace());
  if (!(t > 2.0)) throw Error(ErrorCode::NotHyperbolic, "word " + w.str() + " is not hyperbolic along the family");
  return 2.0 * std::acosh(0.5 * t) * convention_factor(c);
}

void check_commutator(const GeneratorPair& g) {
  const auto comm = g.a * g.b * g.a.inverse() * g.b.inverse();
  if (std::abs(comm.trace() + 2.0) > 1e-8) {
    throw Error(ErrorCode::ValidationError, "commutator trace " + std::to_string(comm.trace()) + " != -2");
  }
}

// Ramp derivative on [0, 1].
double ramp_slope(Ramp r, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  switch (r) {
    case Ramp::Smooth: {
      const double a = std::exp(-1.0 / x);
      const double b = std::exp(-1.0 / (1.0 - x));
      const double s = a + b;
      return a * b * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) / (s * s);
    }
    case Ramp::Cosine:
      return 0.5 * kPi * std::sin(kPi * x);
    case Ramp::None:
      return 0.0;
  }
  return 0.0;
}

struct Shear {
  Ramp ramp;
  double half_width;
  double rate;

  // d psi / d delta, delta = signed distance to the axis (positive for Re w > 0).
  double slope(double delta) const {
    return rate * ramp_slope(ramp, (delta + half_width) / (2.0 * half_width)) / (2.0 * half_width);
  }
  // mu_0 at u in the standardized frame.
  cplx mu(cplx u) const {
    const double theta = std::arg(u);
    const double sn = std::sin(theta);
    const double delta = std::asinh(std::cos(theta) / sn);
    if (std::abs(delta) >= half_width) return 0.0;
    const double dpsi = -slope(delta) / sn;
    return cplx(0.0, 0.5) * dpsi * std::exp(cplx(0.0, 2.0 * theta));
  }
};

struct Stencil {
  std::vector<double> central;
  double d1;
  double order;
  double spread;
};

template <class F>
Stencil richardson(F&& f, double h0) {
  Stencil st;
  for (double h : {h0, 0.5 * h0, 0.25 * h0}) st.central.push_back((f(h) - f(-h)) / (2.0 * h));
  const double r1 = (4.0 * st.central[1] - st.central[0]) / 3.0;
  const double r2 = (4.0 * st.central[2] - st.central[1]) / 3.0;
  st.d1 = r2;
  st.spread = std::abs(r1 - r2);
  const double e1 = std::abs(st.central[0] - st.central[1]);
  const double e2 = std::abs(st.central[1] - st.central[2]);
  const double noise = 1e-12 * (1.0 + std::abs(r2));
  st.order = (e1 > noise && e2 > noise) ? std::log2(e1 / e2) : std::numeric_limits<double>::quiet_NaN();
  return st;
}

}  // namespace

std::string_view to_string(FnDirection d) { return d == FnDirection::Length ? "length" : "twist"; }

std::string_view to_string(Ramp r) {
  switch (r) {
    case Ramp::Smooth:
      return "smooth";
    case Ramp::Cosine:
      return "cosine";
    case Ramp::None:
      return "none";
  }
  return "?";
}

double FnFamily::base_step() const { return h0 > 0.0 ? h0 : 1e-3 * std::max(1.0, length); }

std::vector<double> FnFamily::steps() const {
  const double h = base_step();
  return {h, 0.5 * h, 0.25 * h};
}

GeneratorPair FnFamily::generators(double t) const {
  const auto g = direction == FnDirection::Length ? fn_generators(length + t, twist) : fn_generators(length, twist + t);
  check_commutator(g);
  return g;
}

std::vector<std::shared_ptr<const FuchsianSurface>> FnFamily::member_surfaces(const SurfaceOptions& opts) const {
  std::vector<double> offsets;
  for (double h : steps()) {
    offsets.push_back(h);
    offsets.push_back(-h);
  }
  std::vector<std::shared_ptr<const FuchsianSurface>> out(offsets.size());
  parallel_for(offsets.size(), [&](std::size_t k) {
    const auto g = generators(offsets[k]);
    out[k] = std::make_shared<const FuchsianSurface>(FuchsianSurface::from_generators(g.a, g.b, opts));
  });
  return out;
}

FuchsianSurface FnFamily::base_surface(const SurfaceOptions& opts) const {
  const auto g = generators(0.0);
  return FuchsianSurface::from_generators(g.a, g.b, opts);
}

GeneratorPair twist_pair(const GeneratorPair& g, bool along_a, double t) {
  const auto& x = along_a ? g.a : g.b;
  const auto& y = along_a ? g.b : g.a;
  const auto axis = axis_standardize(x);
  const auto& s = axis.standardize;
  const auto sinv = s.inverse();
  const auto ys = axis_standardize(sinv * y * s);
  // The other axis crosses the imaginary axis; it enters Re w > 0 when it leaves Re w < 0.
  const bool rightward = ys.repelling.has_value() && *ys.repelling < 0.0;
  const double sigma = rightward ? 1.0 : -1.0;
  const auto shift = s * MobiusTransform::dilation(sigma * t) * sinv;
  const auto moved = shift * y;
  return along_a ? GeneratorPair{g.a, moved} : GeneratorPair{moved, g.b};
}

double collar_bound(double classical_length) {
  if (!(classical_length > 0.0)) throw Error(ErrorCode::NonPositiveLength, "collar of a non-positive length");
  return std::asinh(1.0 / std::sinh(0.5 * classical_length));
}

double default_half_width(double classical_length) { return 0.4 * collar_bound(classical_length); }

TwistBeltrami twist_beltrami(const FuchsianSurface& s, const ClosedGeodesic& alpha, double half_width,
                             const QuadratureMesh& mesh, const TwistOptions& opts) {
  const double bound = collar_bound(alpha.classical_length);
  if (!(half_width > 0.0) || half_width >= bound) {
    throw Error(ErrorCode::CollarTooWide, "half-width " + std::to_string(half_width) + " outside (0, " +
                                              std::to_string(bound) + ")");
  }
  const Shear shear{opts.ramp, half_width, opts.rate};
  const auto& S = alpha.axis.standardize;
  const auto sinv = S.inverse();
  const double len = alpha.classical_length;

  TwistBeltrami out;
  out.half_width = half_width;
  out.collar_bound = bound;
  out.rate = opts.rate;
  out.ramp = opts.ramp;
  out.sample.mesh = &mesh;
  out.sample.compact_support = true;
  out.sample.values.assign(mesh.nodes.size(), 0.0);

  // Highest point of the geodesic in the cusp frame bounds the collar height.
  double top = 0.0;
  for (int k = 0; k < 512; ++k) {
    const auto p = unit_speed_point(alpha.axis, len * k / 512.0, NormConvention::Riemannian).point;
    top = std::max(top, s.ford_reduce(p.z()).point.imag());
  }
  const double cap = 1.05 * top * std::exp(half_width);

  std::vector<FordReduction> reduced(mesh.nodes.size(), FordReduction{0.0, MobiusTransform::identity(), 0});
  double radius = 0.0;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    reduced[i] = s.ford_reduce(mesh.nodes[i].point.z());
    const cplx zr = reduced[i].point;
    if (zr.imag() <= cap) radius = std::max(radius, hyp_distance(s.center(), HPoint(zr.real(), zr.imag())));
  }
  radius += half_width + 0.05;

  std::vector<MobiusTransform> frames;
  if (opts.ramp != Ramp::None && opts.rate != 0.0) {
    for (const auto& h : coset_reps(s, alpha, radius)) frames.push_back(sinv * h);
  }
  out.lifts = frames.size();

  std::vector<int> overlap(mesh.nodes.size(), 0);
  parallel_for(mesh.nodes.size(), [&](std::size_t i) {
    const cplx zr = reduced[i].point;
    if (zr.imag() > cap) return;
    const cplx z = mesh.nodes[i].point.z();
    int hits = 0;
    for (const auto& f : frames) {
      const cplx u = f.apply(zr);
      const double theta = std::arg(u);
      if (std::abs(std::asinh(std::cos(theta) / std::sin(theta))) >= half_width) continue;
      if (++hits > 1) break;
      const auto m = f * reduced[i].element;
      const cplx d = m.derivative(z);
      out.sample.values[i] = shear.mu(u) * std::conj(d) / d;
    }
    overlap[i] = hits > 1 ? 1 : 0;
  });
  for (int o : overlap) {
    if (o != 0) throw Error(ErrorCode::CollarTooWide, "collar meets one of its translates");
  }

  const int n_rho = opts.rho_samples;
  const int panels = opts.delta_panels;
  out.sample.exact_pairing = [shear, S, len, n_rho, panels](const QuadDifferential& q) -> cplx {
    if (shear.ramp == Ramp::None || shear.rate == 0.0) return 0.0;
    const double w = shear.half_width;
    std::vector<cplx> terms;
    for (int p = 0; p < panels; ++p) {
      const auto rule = gauss_legendre(8, -w + 2.0 * w * p / panels, -w + 2.0 * w * (p + 1) / panels);
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double delta = rule.nodes[k];
        const double dpsi = shear.slope(delta);
        if (dpsi == 0.0) continue;
        const cplx dir(std::tanh(delta), 1.0 / std::cosh(delta));  // e^{i theta}
        for (int j = 0; j < n_rho; ++j) {
          const cplx wpt = std::exp(len * j / n_rho) * dir;
          const cplx dS = S.derivative(wpt);
          terms.push_back(rule.weights[k] * dpsi * q(S.apply(wpt)) * dS * dS * wpt * wpt);
        }
      }
    }
    return cplx(0.0, -0.5) * (len / n_rho) * pairwise_sum(terms);
  };
  return out;
}

BeltramiSample combine(const BeltramiSample& a, cplx ca, const BeltramiSample& b, cplx cb) {
  if (a.mesh != b.mesh || a.values.size() != b.values.size()) {
    throw Error(ErrorCode::DimensionMismatch, "Beltrami samples live on different meshes");
  }
  BeltramiSample out;
  out.mesh = a.mesh;
  out.compact_support = a.compact_support && b.compact_support;
  out.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = ca * a.values[i] + cb * b.values[i];
  if (a.exact_pairing && b.exact_pairing) {
    out.exact_pairing = [pa = a.exact_pairing, pb = b.exact_pairing, ca, cb](const QuadDifferential& q) {
      return ca * pa(q) + cb * pb(q);
    };
  }
  return out;
}

FdResult fd_length_derivative(const FnFamily& family, const Word& word) {
  const auto st = richardson([&](double t) { return word_length(family.generators(t), word, family.convention); },
                             family.base_step());
  if (st.spread > 1e-3 * std::abs(st.d1) + 1e-10) {
    throw Error(ErrorCode::NonconvergentFD, "Richardson estimates for " + word.str() + " differ by " +
                                                std::to_string(st.spread));
  }
  return {st.d1, st.order, st.central};
}

CrossTwist cross_twist_rates(const FnFamily& family) {
  const auto base = family.generators(0.0);
  const double h = family.base_step();
  auto coords = [&](double t) {
    const auto g = twist_pair(base, false, t);
    return fn_coordinates(g.a, g.b);
  };
  const auto dl = richardson([&](double t) { return coords(t).length; }, h);
  const auto dt = richardson([&](double t) { return coords(t).twist; }, h);
  for (const auto* st : {&dl, &dt}) {
    if (st->spread > 1e-3 * std::abs(st->d1) + 1e-10) {
      throw Error(ErrorCode::NonconvergentFD, "cross twist rates did not converge");
    }
  }
  if (std::abs(dl.d1) < 1e-8) throw Error(ErrorCode::DegenerateBasis, "twist along B does not change the length of A");
  return {dl.d1, dt.d1};
}

BeltramiSample direction_beltrami(const FnFamily& family, const FuchsianSurface& base, const QuadratureMesh& mesh,
                                  const TwistOptions& opts) {
  const auto alpha = geodesic_representative(base, Word::parse("A"));
  const auto ta = twist_beltrami(base, alpha, default_half_width(alpha.classical_length), mesh, opts);
  if (family.direction == FnDirection::Twist) return ta.sample;
  const auto beta = geodesic_representative(base, Word::parse("B"));
  const auto tb = twist_beltrami(base, beta, default_half_width(beta.classical_length), mesh, opts);
  const auto cr = cross_twist_rates(family);
  return combine(tb.sample, 1.0 / cr.dlength, ta.sample, -cr.dtwist / cr.dlength);
}

GardinerReport gardiner_check(const FnFamily& family, const Word& word, const HarmonicBeltrami& direction,
                              VariationEngine& engine, const FuchsianSurface& base, double rel_tol, double abs_tol) {
  if (engine.convention() != family.convention) {
    throw Error(ErrorCode::ValidationError, "engine and family use different length conventions");
  }
  GardinerReport r;
  r.word = word.str();
  r.convention = family.convention;
  const auto g = geodesic_representative(base, word);
  r.formula = 2.0 * engine.first_variation(g, direction).real();
  const auto fd = fd_length_derivative(family, word);
  r.fd = fd.d1;
  r.order_estimate = fd.order_estimate;
  r.abs_error = std::abs(r.formula - r.fd);
  r.rel_error = r.abs_error / std::max(std::abs(r.fd), abs_tol);
  r.vanishing = std::abs(r.fd) < abs_tol;
  r.pass = r.vanishing ? std::abs(r.formula) < abs_tol : r.rel_error < rel_tol;
  return r;
}

}  // namespace geolen
