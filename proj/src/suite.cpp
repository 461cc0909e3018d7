#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "geolen/family.hpp"
#include "geolen/numerics.hpp"
#include "geolen/report.hpp"

namespace geolen {

namespace {

using Clock = std::chrono::steady_clock;

struct Context {
  const RunConfig& cfg;
  RunReport& report;
  std::mt19937_64 rng;

  void check(const std::string& suite, const std::string& name, double value, double bound, double margin,
             double budget = 0.0, const std::string& geodesic = "") {
    report.checks.push_back({suite, geodesic, name, value, bound, margin, budget, margin > budget});
  }
  // value <= bound passes
  void upper(const std::string& suite, const std::string& name, double value, double bound,
             const std::string& geodesic = "") {
    check(suite, name, value, bound, bound - value, 0.0, geodesic);
    report.checks.back().pass = value <= bound;
  }
  void lap(const std::string& key, Clock::time_point& t0) {
    const auto t = Clock::now();
    report.timings[key] = std::chrono::duration<double>(t - t0).count();
    t0 = t;
  }
};

SurfaceOptions surface_options(const RunConfig& c) {
  SurfaceOptions o;
  o.max_word_len = c.max_word_len;
  return o;
}

std::shared_ptr<const FuchsianSurface> preset_surface(const RunConfig& c) {
  if (c.preset == "modular") return std::make_shared<const FuchsianSurface>(FuchsianSurface::modular(surface_options(c)));
  return std::make_shared<const FuchsianSurface>(punctured_torus_from_fn(c.fn_length, c.fn_twist, surface_options(c)));
}

FnCoordinates preset_coordinates(const RunConfig& c) {
  if (c.preset == "fn") return {c.fn_length, c.fn_twist};
  const auto m = FuchsianSurface::modular(SurfaceOptions{1, 4'000'000, std::nullopt});
  return fn_coordinates(m.A(), m.B());
}

ResolventOptions resolvent_options(const RunConfig& c) {
  ResolventOptions o;
  o.cutoff = c.kernel_cutoff;
  return o;
}

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

MobiusTransform random_element(std::mt19937_64& rng) {
  for (;;) {
    const double a = uniform(rng, 0.3, 3.0);
    const double b = uniform(rng, -2.0, 2.0);
    const double c = uniform(rng, -2.0, 2.0);
    const double d = (1.0 + b * c) / a;
    if (std::abs(a + d) > 2.2) return MobiusTransform::normalized(a, b, c, d);
  }
}

HPoint random_point(std::mt19937_64& rng) { return {uniform(rng, -3.0, 3.0), std::exp(uniform(rng, -2.0, 2.0))}; }

PeriodicFunction random_band_limited(std::mt19937_64& rng, double period, std::size_t n, int band) {
  std::normal_distribution<double> gauss;
  std::vector<cplx> coeffs(n, 0.0);
  for (int nu = -band; nu <= band; ++nu) {
    const auto k = static_cast<std::size_t>(nu >= 0 ? nu : static_cast<int>(n) + nu);
    coeffs[k] = cplx(gauss(rng), gauss(rng)) / (1.0 + std::abs(nu));
  }
  return from_coefficients(period, coeffs);
}

double max_abs(const PeriodicFunction& f) {
  double m = 0.0;
  for (const auto& v : f.samples) m = std::max(m, std::abs(v));
  return m;
}

// Arclength of the axis segment from S(i) to S(i e^L) by Gauss quadrature of |dz| / y.
double axis_arclength(const GeodesicAxis& axis) {
  const auto rule = gauss_legendre(40, 0.0, axis.classical_length);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const cplx w(0.0, std::exp(rule.nodes[k]));
    const cplx z = axis.standardize.apply(w);
    const cplx dz = axis.standardize.derivative(w) * w;
    sum += rule.weights[k] * std::abs(dz) / z.imag();
  }
  return sum;
}

void geometry_suite(Context& ctx) {
  const auto& c = ctx.cfg;
  const std::string s = "geometry";
  auto t0 = Clock::now();
  double worst = 0.0;
  for (int k = 0; k < c.random_elements; ++k) {
    const auto axis = axis_standardize(random_element(ctx.rng));
    const double arc = axis_arclength(axis);
    worst = std::max(worst, std::abs(arc - axis.classical_length) / axis.classical_length);
  }
  ctx.upper(s, "trace_vs_arclength", worst, c.tol.length_quadrature);

  double tri = -1e300, iso = 0.0;
  for (int k = 0; k < c.random_samples; ++k) {
    const auto p = random_point(ctx.rng), q = random_point(ctx.rng), r = random_point(ctx.rng);
    tri = std::max(tri, hyp_distance(p, r) - hyp_distance(p, q) - hyp_distance(q, r));
    const auto m = random_element(ctx.rng);
    const double d = hyp_distance(p, q);
    iso = std::max(iso, std::abs(hyp_distance(mobius_apply(m, p), mobius_apply(m, q)) - d) / (1.0 + d));
  }
  ctx.upper(s, "triangle_inequality", tri, 1e-12);
  ctx.upper(s, "isometry_invariance", iso, 1e-9);
  ctx.lap("geometry.elements", t0);

  const auto surf = preset_surface(c);
  const auto mesh = build_mesh(*surf, c.mesh_cells, c.y_max);
  const double area = mesh.total_weight();
  ctx.upper(s, "gauss_bonnet_area", std::abs(area - 2.0 * std::numbers::pi) / (2.0 * std::numbers::pi), c.tol.area);
  ctx.check(s, "discreteness", surf->min_center_displacement(), 1e-3, surf->min_center_displacement() - 1e-3);
  ctx.lap("geometry.area", t0);

  const auto basis = basis_quadratic(surf);
  const auto q = basis.front();
  ctx.upper(s, "automorphy_residual", q->automorphy_residual(*surf, 64, c.seed), 1e-8);
  const auto g = geodesic_representative(*surf, Word::parse(c.geodesics.front()));
  const RelativePoincareSeries series(*surf, g, c.coset_radius);
  std::vector<cplx> ratios;
  for (const auto& z : core_probes(mesh, 8)) ratios.push_back(series.evaluate(z).value / (*q)(z));
  cplx mean = 0.0;
  for (const auto& r : ratios) mean += r / static_cast<double>(ratios.size());
  double spread = 0.0;
  for (const auto& r : ratios) spread = std::max(spread, std::abs(r / mean - 1.0));
  ctx.upper(s, "poincare_proportional", spread, 1e-3, g.word.str());
  ctx.lap("geometry.poincare", t0);
}

void operators_suite(Context& ctx) {
  const auto& c = ctx.cfg;
  const std::string s = "operators";
  constexpr std::size_t kSamples = 256;
  double identity = 0.0;
  for (int k = 0; k < c.operator_inputs; ++k) {
    const auto f = random_band_limited(ctx.rng, uniform(ctx.rng, 0.5, 5.0), kSamples, 24);
    identity = std::max(identity, max_abs(m_operator(f) - m_operator_identity(f)) / std::max(1.0, max_abs(f)));
  }
  ctx.upper(s, "m_identity", identity, c.tol.operator_identity);

  double lower = 1e300, upper = 1e300, sandwich_lo = 1e300, sandwich_hi = 1e300;
  for (int k = 0; k < c.m_form_inputs; ++k) {
    const auto f = random_band_limited(ctx.rng, uniform(ctx.rng, 0.5, 5.0), kSamples, 24);
    const auto r = prop73_report(f);
    lower = std::min(lower, r.mid);
    upper = std::min(upper, r.rhs - r.mid);
    sandwich_lo = std::min(sandwich_lo, r.mid - 0.5 * r.variance);
    sandwich_hi = std::min(sandwich_hi, r.variance - r.mid);
  }
  ctx.check(s, "m_form_lower", lower, 0.0, lower + c.tol.m_form);
  ctx.check(s, "m_form_upper", upper, 0.0, upper + c.tol.m_form);
  ctx.check(s, "m_form_sandwich_lower", sandwich_lo, 0.0, sandwich_lo + c.tol.m_form);
  ctx.check(s, "m_form_sandwich_upper", sandwich_hi, 0.0, sandwich_hi + c.tol.m_form);
  double constants = 0.0;
  for (double v : {1.0, -2.5, 7.0}) {
    const auto r = prop73_report(PeriodicFunction::constant(1.7, kSamples, cplx(v, 0.5 * v)));
    constants = std::max({constants, std::abs(r.mid), std::abs(r.rhs)});
  }
  ctx.upper(s, "m_form_constants", constants, 1e-13);

  double injection = 0.0;
  for (int k = 0; k < c.operator_inputs; ++k) {
    const double period = uniform(ctx.rng, 0.5, 5.0);
    const auto phi = random_band_limited(ctx.rng, period, kSamples, 12);
    const auto ai = random_band_limited(ctx.rng, period, kSamples, 24);
    const auto aj = random_band_limited(ctx.rng, period, kSamples, 24);
    const cplx h = second_variation_line(phi, ai, aj);
    const cplx h_alt = second_variation_alt_line(phi, ai, aj);
    injection = std::max(injection, std::abs(h - h_alt) / std::max(1.0, std::abs(h)));
  }
  ctx.upper(s, "dual_route_injection", injection, c.tol.injection);
}

void resolvent_suite(Context& ctx) {
  const auto& c = ctx.cfg;
  const std::string s = "resolvent";
  const auto surf = preset_surface(c);
  const auto data = build_mesh(*surf, c.mesh_cells, c.y_max);
  const auto field = build_mesh(*surf, c.field_cells, c.y_max);
  const auto basis = basis_quadratic(surf);
  const Resolvent r(resolvent_options(c));
  const HarmonicBeltrami a(basis, Eigen::VectorXcd::Ones(1));
  const auto probes = core_probes(field, static_cast<std::size_t>(c.probes));

  const auto one = constant_field(data, 1.0);
  double calib = 0.0;
  for (const auto& z : probes) calib = std::max(calib, std::abs(r.apply(one, z).value - 1.0));
  ctx.upper(s, "calibration_constant", calib, c.tol.calibration);

  const auto chi = pointwise_product(data, a, a);
  const auto phi = resolve_field(r, field, chi);
  const auto pde = verify_pde(phi, chi, probes);
  ctx.upper(s, "pde_mean_residual", pde.mean_relative, c.tol.pde_mean);

  const double wp = wp_gram(data, a, a).real();
  const double integral = phi.integral().real();
  ctx.upper(s, "wp_dual_route", std::abs(integral - wp) / std::abs(wp), c.tol.wp_relative);

  const auto sup = sup_norm(data, a);
  double phi_max = 0.0;
  for (const auto& v : phi.values) phi_max = std::max(phi_max, v.real());
  const double bound = sup.value * sup.value * (1.0 + c.tol.max_principle);
  ctx.upper(s, "maximum_principle", phi_max, bound);
}

void gardiner_suite(Context& ctx) {
  const auto& c = ctx.cfg;
  const std::string s = "gardiner";
  const auto fc = preset_coordinates(c);
  for (auto dir : {FnDirection::Twist, FnDirection::Length}) {
    const FnFamily fam{fc.length, fc.twist, dir, 0.0, c.convention};
    const auto base = std::make_shared<const FuchsianSurface>(fam.base_surface(surface_options(c)));
    const auto mesh = build_mesh(*base, c.mesh_cells, c.y_max);
    const auto basis = basis_quadratic(base);
    VariationEngine engine(basis, mesh, Resolvent(resolvent_options(c)), c.convention, c.line_samples);
    const auto a = harmonic_projection(mesh, basis, direction_beltrami(fam, *base, mesh));
    const std::string tag(to_string(dir));
    for (const auto& w : c.geodesics) {
      const auto g = gardiner_check(fam, Word::parse(w), a, engine, *base, c.tol.gardiner_relative,
                                    c.tol.gardiner_absolute);
      ctx.report.gardiner.push_back({tag, w, g.formula, g.fd, g.order_estimate, g.rel_error, g.pass});
      const double tol = g.vanishing ? c.tol.gardiner_absolute : c.tol.gardiner_relative;
      const double err = g.vanishing ? std::abs(g.formula) : g.rel_error;
      ctx.upper(s, "gardiner_" + tag, err, tol, w);
      if (std::isfinite(g.order_estimate)) {
        ctx.check(s, "fd_order_" + tag, g.order_estimate, 2.0, 0.2 - std::abs(g.order_estimate - 2.0), 0.0, w);
      }
    }
    if (dir != FnDirection::Twist) continue;
    const auto alpha = geodesic_representative(*base, Word::parse("A"));
    const double hw = default_half_width(alpha.classical_length);
    TwistOptions smooth, cosine;
    cosine.ramp = Ramp::Cosine;
    const auto cs = harmonic_projection(mesh, basis, twist_beltrami(*base, alpha, hw, mesh, smooth).sample);
    const auto cc = harmonic_projection(mesh, basis, twist_beltrami(*base, alpha, hw, mesh, cosine).sample);
    const double scale = cs.coeffs().norm();
    ctx.upper(s, "twist_ramp_independence", (cs.coeffs() - cc.coeffs()).norm() / scale, 1e-3);
    const auto fine = build_mesh(*base, 4 * c.mesh_cells, c.y_max);
    const auto cm = harmonic_projection(fine, basis, twist_beltrami(*base, alpha, hw, fine, smooth).sample, true);
    ctx.upper(s, "twist_projection_mesh", (cs.coeffs() - cm.coeffs()).norm() / scale, 1e-3);
  }
}

std::vector<double> row_major(const Eigen::MatrixXcd& m, bool imag) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(imag ? m(i, j).imag() : m(i, j).real());
  }
  return out;
}

void variation_suite(Context& ctx) {
  const auto& c = ctx.cfg;
  const std::string s = "variation";
  const auto surf = preset_surface(c);
  const auto mesh = build_mesh(*surf, c.mesh_cells, c.y_max);
  const auto basis = basis_quadratic(surf);
  VariationEngine engine(basis, mesh, Resolvent(resolvent_options(c)), c.convention, c.line_samples);
  const HarmonicBeltrami a(basis, Eigen::VectorXcd::Ones(1));
  const auto sup = sup_norm(mesh, a);
  std::vector<SumTerm> terms;
  std::vector<double> budgets;
  for (const auto& w : c.geodesics) {
    const auto g = geodesic_representative(*surf, Word::parse(w));
    const auto rep = engine.bounds_report(g, {a}, {sup});
    for (const auto& b : rep.checks) {
      ctx.report.checks.push_back({s, w, b.name, b.value, b.bound, b.margin, b.budget, b.pass});
    }
    GeodesicRecord rec;
    rec.word = w;
    rec.length_classical = rep.length_classical;
    rec.length = rep.length;
    rec.samples = rep.samples;
    for (Eigen::Index i = 0; i < rep.dl.size(); ++i) {
      rec.dl_re.push_back(rep.dl(i).real());
      rec.dl_im.push_back(rep.dl(i).imag());
    }
    rec.h_re = row_major(rep.h, false);
    rec.h_im = row_major(rep.h, true);
    rec.hlog_re = row_major(rep.hlog, false);
    rec.hlog_im = row_major(rep.hlog, true);
    rec.sup_norms = rep.sup_norms;
    rec.budget = rep.budget;
    const auto& line = engine.line_with_phi(g);
    const auto phi = engine.phi_on_line(line, a, a);
    const auto arestr = engine.restriction(line, a);
    const std::size_t stride = std::max<std::size_t>(1, line.samples / 256);
    for (std::size_t k = 0; k < line.samples; k += stride) {
      rec.profile_t.push_back(rep.length * static_cast<double>(k) / static_cast<double>(line.samples));
      rec.phi_profile.push_back(phi.samples[k].real());
      rec.a_profile.push_back(std::abs(arestr.samples[k]));
    }
    ctx.report.geodesics.push_back(std::move(rec));
    terms.push_back({rep.length, rep.dl, rep.h});
    budgets.push_back(rep.budget);
  }
  if (terms.size() >= 2) {
    const auto sum = sum_log_psh_check({terms[0], terms[1]});
    const double budget = (budgets[0] + budgets[1]) / (terms[0].length + terms[1].length);
    ctx.check(s, "log_sum_psh", sum.margin, 0.0, sum.margin, budget,
              c.geodesics[0] + "+" + c.geodesics[1]);
  }
}

}  // namespace

std::size_t RunReport::failures() const {
  std::size_t n = errors.size();
  for (const auto& c : checks) n += c.pass ? 0 : 1;
  return n;
}

RunReport run_suite(const RunConfig& config) {
  validate(config);
  RunReport report;
  report.config = config_to_json(config);
  report.seed = config.seed;
  Context ctx{config, report, std::mt19937_64(config.seed)};
  const std::pair<const char*, void (*)(Context&)> suites[] = {{"geometry", geometry_suite},
                                                               {"operators", operators_suite},
                                                               {"resolvent", resolvent_suite},
                                                               {"gardiner", gardiner_suite},
                                                               {"variation", variation_suite}};
  std::uint64_t stream = 0;
  for (const auto& [name, fn] : suites) {
    ++stream;
    if (!config.suite_enabled(name)) continue;
    ctx.rng.seed(config.seed + 0x9E3779B97F4A7C15ull * stream);
    const auto t0 = Clock::now();
    try {
      fn(ctx);
    } catch (const std::exception& e) {
      report.errors.push_back(std::string(name) + ": " + e.what());
      report.checks.push_back({name, "", "setup", 0.0, 0.0, -1.0, 0.0, false});
    }
    report.timings[name] = std::chrono::duration<double>(Clock::now() - t0).count();
  }
  report.pass = report.failures() == 0;
  return report;
}

}  // namespace geolen
