#include "geolen/variation.hpp"

#include <algorithm>

#include "geolen/numerics.hpp"

namespace geolen {

namespace {

double hermitian_defect(const Eigen::MatrixXcd& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

void require_hermitian(const Eigen::MatrixXcd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
  if (hermitian_defect(m) > 1e-10 * scale) throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian");
}

double min_eigenvalue(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

PeriodicFunction every_other(const PeriodicFunction& f) {
  std::vector<cplx> s;
  for (std::size_t k = 0; k < f.size(); k += 2) s.push_back(f.samples[k]);
  return {f.period, std::move(s)};
}

BoundCheck make_check(std::string name, double value, double bound, double margin, double budget) {
  return {std::move(name), value, bound, margin, budget, margin > budget};
}

}  // namespace

double order_margin(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& n) {
  if (m.rows() != n.rows() || m.cols() != n.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix size mismatch");
  require_hermitian(m);
  require_hermitian(n);
  return min_eigenvalue(m - n);
}

bool hermitian_order(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& n, double tol) {
  return order_margin(m, n) >= -tol;
}

Eigen::MatrixXcd log_hessian(double length, const Eigen::VectorXcd& dl, const Eigen::MatrixXcd& h) {
  if (!(length > 0.0)) throw Error(ErrorCode::NonPositiveLength, "log Hessian needs a positive length");
  if (h.rows() != dl.size() || h.cols() != dl.size()) throw Error(ErrorCode::DimensionMismatch, "size mismatch");
  return h / length - dl * dl.adjoint() / (length * length);
}

cplx second_variation_line(const PeriodicFunction& phi, const PeriodicFunction& ai, const PeriodicFunction& aj) {
  const auto r2 = line_resolvent(ai, 2.0);
  const double len = ai.period;
  return 0.5 * (geodesic_integral(phi) + geodesic_inner(r2, aj)) +
         geodesic_integral(ai) * std::conj(geodesic_integral(aj)) / (4.0 * len);
}

cplx second_variation_alt_line(const PeriodicFunction& phi, const PeriodicFunction& ai, const PeriodicFunction& aj) {
  return 0.5 * (geodesic_integral(phi) + geodesic_inner(ai, aj)) - 0.5 * geodesic_inner(m_operator(ai), aj);
}

SumLogReport sum_log_psh_check(const std::vector<SumTerm>& terms, double tol) {
  if (terms.empty()) throw Error(ErrorCode::DimensionMismatch, "no summands");
  const auto n = terms.front().dl.size();
  double total = 0.0;
  Eigen::VectorXcd dsum = Eigen::VectorXcd::Zero(n);
  Eigen::MatrixXcd hsum = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& t : terms) {
    if (t.dl.size() != n || t.h.rows() != n || t.h.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "summands have different dimensions");
    }
    total += t.length;
    dsum += t.dl;
    hsum += t.h;
    rhs += t.length * log_hessian(t.length, t.dl, t.h);
  }
  SumLogReport r;
  r.lhs = log_hessian(total, dsum, hsum);
  r.rhs = rhs / total;
  r.margin = order_margin(r.lhs, r.rhs);
  r.pass = r.margin >= -tol;
  return r;
}

// ---------------------------------------------------------------- engine

VariationEngine::VariationEngine(std::vector<std::shared_ptr<const QuadDifferential>> basis,
                                 const QuadratureMesh& data_mesh, Resolvent resolvent, NormConvention convention,
                                 std::size_t samples)
    : basis_(std::move(basis)),
      data_mesh_(&data_mesh),
      resolvent_(std::move(resolvent)),
      convention_(convention),
      samples_(samples) {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  chi_.resize(basis_.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      HarmonicBeltrami ek(basis_, Eigen::VectorXcd::Unit(n, k));
      HarmonicBeltrami el(basis_, Eigen::VectorXcd::Unit(n, l));
      chi_[k].push_back(pointwise_product(*data_mesh_, ek, el));
    }
  }
}

double VariationEngine::scale() const {
  return convention_factor(convention_) / convention_factor(NormConvention::Hermitian);
}

GeodesicLine& VariationEngine::entry(const ClosedGeodesic& g) {
  const auto key = g.word.cyclic_normal_form().str();
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  GeodesicLine line{g, 0, {}, {}};
  line.samples = samples_ != 0 ? samples_ : default_samples(g.length(convention_));
  const auto n = static_cast<Eigen::Index>(basis_.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    HarmonicBeltrami ek(basis_, Eigen::VectorXcd::Unit(n, k));
    line.restrictions.push_back(restrict_to_geodesic(ek, g, line.samples, NormConvention::Hermitian));
  }
  return cache_.emplace(key, std::move(line)).first->second;
}

const GeodesicLine& VariationEngine::line(const ClosedGeodesic& g) { return entry(g); }

const GeodesicLine& VariationEngine::line_with_phi(const ClosedGeodesic& g) {
  auto& line = entry(g);
  if (!line.phi.empty()) return line;
  const double period = g.length(NormConvention::Hermitian);
  std::vector<cplx> points(line.samples);
  for (std::size_t t = 0; t < line.samples; ++t) {
    points[t] = unit_speed_point(g.axis, period * t / line.samples, NormConvention::Hermitian).point.z();
  }
  const auto n = basis_.size();
  line.phi.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      std::vector<cplx> vals(line.samples);
      const auto& chi = chi_[k][l];
      parallel_for(line.samples, [&](std::size_t t) { vals[t] = resolvent_.apply(chi, points[t]).value; });
      line.phi[k].emplace_back(period, std::move(vals));
    }
  }
  return line;
}

PeriodicFunction VariationEngine::restriction(const GeodesicLine& line, const HarmonicBeltrami& a) const {
  auto out = PeriodicFunction::constant(line.restrictions.front().period, line.samples, 0.0);
  for (std::size_t k = 0; k < basis_.size(); ++k) out = out + a.coeffs()(k) * line.restrictions[k];
  return out;
}

PeriodicFunction VariationEngine::phi_on_line(const GeodesicLine& line, const HarmonicBeltrami& ai,
                                              const HarmonicBeltrami& aj) const {
  auto out = PeriodicFunction::constant(line.restrictions.front().period, line.samples, 0.0);
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    for (std::size_t l = 0; l < basis_.size(); ++l) {
      const cplx c = ai.coeffs()(k) * std::conj(aj.coeffs()(l));
      if (c != 0.0) out = out + c * line.phi[k][l];
    }
  }
  return out;
}

cplx VariationEngine::first_variation(const ClosedGeodesic& g, const HarmonicBeltrami& a) {
  if (a.is_zero()) return 0.0;
  const auto& l = line(g);
  return 0.5 * geodesic_integral(restriction(l, a)) * scale();
}

cplx VariationEngine::second_variation(const ClosedGeodesic& g, const HarmonicBeltrami& ai,
                                       const HarmonicBeltrami& aj) {
  if (ai.is_zero() || aj.is_zero()) return 0.0;
  const auto& l = line_with_phi(g);
  return second_variation_line(phi_on_line(l, ai, aj), restriction(l, ai), restriction(l, aj)) * scale();
}

cplx VariationEngine::second_variation_alt(const ClosedGeodesic& g, const HarmonicBeltrami& ai,
                                           const HarmonicBeltrami& aj) {
  if (ai.is_zero() || aj.is_zero()) return 0.0;
  const auto& l = line_with_phi(g);
  return second_variation_alt_line(phi_on_line(l, ai, aj), restriction(l, ai), restriction(l, aj)) * scale();
}

VariationReport VariationEngine::bounds_report(const ClosedGeodesic& g, const std::vector<HarmonicBeltrami>& dirs,
                                               const std::vector<SupNorm>& sups) {
  if (dirs.size() != sups.size()) throw Error(ErrorCode::DimensionMismatch, "one sup norm per direction");
  const auto& l = line_with_phi(g);
  const auto n = static_cast<Eigen::Index>(dirs.size());
  const double s = scale();
  const double len_h = g.length(NormConvention::Hermitian);

  VariationReport r;
  r.word = g.word.str();
  r.convention = convention_;
  r.length_classical = g.classical_length;
  r.length = g.length(convention_);
  r.samples = l.samples;
  r.dl.resize(n);
  r.h.resize(n, n);
  r.h_alt.resize(n, n);
  r.lower_length.resize(n, n);
  r.lower_log.resize(n, n);
  Eigen::MatrixXcd h_coarse(n, n);
  double phi_scale = 0.0;

  std::vector<PeriodicFunction> a;
  for (const auto& d : dirs) a.push_back(restriction(l, d));
  for (Eigen::Index i = 0; i < n; ++i) r.dl(i) = 0.5 * geodesic_integral(a[i]) * s;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto phi = phi_on_line(l, dirs[i], dirs[j]);
      const cplx int_phi = geodesic_integral(phi);
      phi_scale = std::max(phi_scale, std::abs(int_phi));
      const cplx cross = geodesic_integral(a[i]) * std::conj(geodesic_integral(a[j]));
      r.h(i, j) = second_variation_line(phi, a[i], a[j]) * s;
      r.h_alt(i, j) = second_variation_alt_line(phi, a[i], a[j]) * s;
      h_coarse(i, j) = second_variation_line(every_other(phi), every_other(a[i]), every_other(a[j])) * s;
      r.lower_length(i, j) = 0.5 * (int_phi + cross / len_h) * s;
      r.lower_log(i, j) = int_phi / (2.0 * len_h) + cross / (4.0 * len_h * len_h);
    }
  }
  r.hlog = log_hessian(r.length, r.dl, r.h);

  // Uncertainty: resolvent accuracy on the phi term plus line-sampling drift.
  constexpr double kResolventRelative = 1e-4;
  const double hmax = r.h.cwiseAbs().maxCoeff();
  r.budget = kResolventRelative * 0.5 * phi_scale * s + (r.h - h_coarse).cwiseAbs().maxCoeff() + 1e-12 * hmax;
  const double log_budget = r.budget / r.length;

  const double sym = hermitian_defect(r.h);
  r.checks.push_back({"hermitian_symmetry", sym, 1e-10 * std::max(1.0, hmax), 1e-10 * std::max(1.0, hmax) - sym, 0.0,
                      sym <= 1e-10 * std::max(1.0, hmax)});
  const double route = (r.h - r.h_alt).cwiseAbs().maxCoeff();
  r.checks.push_back(make_check("dual_route", route, 1e-6 * hmax, 1e-6 * hmax - route, 0.0));
  r.checks.push_back(
      make_check("hessian_lower", order_margin(r.h, r.lower_length), 0.0, order_margin(r.h, r.lower_length), r.budget));
  r.checks.push_back(make_check("hessian_positive", min_eigenvalue(r.h), 0.0, min_eigenvalue(r.h), r.budget));
  r.checks.push_back(
      make_check("log_hessian_lower", order_margin(r.hlog, r.lower_log), 0.0, order_margin(r.hlog, r.lower_log), log_budget));
  r.checks.push_back(make_check("log_hessian_positive", min_eigenvalue(r.hlog), 0.0, min_eigenvalue(r.hlog), log_budget));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sup = sups[i].value;
    r.sup_norms.push_back(sup);
    const double sup_budget = 2.0 * sup * sups[i].uncertainty;
    const std::string idx = "[" + std::to_string(i) + "]";
    const double hessian_cap = r.length * sup * sup;
    r.checks.push_back(make_check("hessian_sup_upper" + idx, r.h(i, i).real(), hessian_cap, hessian_cap - r.h(i, i).real(),
                                  r.budget + r.length * sup_budget));
    const double log_cap = 0.75 * sup * sup;
    r.checks.push_back(make_check("log_hessian_sup_upper" + idx, r.hlog(i, i).real(), log_cap, log_cap - r.hlog(i, i).real(),
                                  log_budget + 0.75 * sup_budget));
  }
  r.pass = std::all_of(r.checks.begin(), r.checks.end(), [](const BoundCheck& c) { return c.pass; });
  return r;
}

}  // namespace geolen
