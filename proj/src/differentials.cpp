#include "geolen/differentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SVD>

#include "geolen/numerics.hpp"

namespace geolen {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Random group element of moderate length and a random point near the domain.
std::pair<MobiusTransform, cplx> random_pair(const FuchsianSurface& s, std::mt19937_64& rng) {
  const auto& table = s.table();
  std::size_t hi = std::min<std::size_t>(table.size(), 161);  // words up to length 4
  std::uniform_int_distribution<std::size_t> pick(1, hi - 1);
  std::uniform_real_distribution<double> ux(-0.5, 0.5);
  std::uniform_real_distribution<double> uy(std::log(0.3), std::log(3.0));
  const cplx z = s.center().z() + cplx(ux(rng), 0.0);
  return {table[pick(rng)].element, cplx(z.real(), std::exp(uy(rng)))};
}

}  // namespace

QuadDifferential::QuadDifferential(Evaluator eval, Truncation trunc, double residual_bound, std::string label)
    : eval_(std::move(eval)), trunc_(trunc), residual_bound_(residual_bound), label_(std::move(label)) {}

double QuadDifferential::automorphy_residual(const FuchsianSurface& s, int samples, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const auto [g, z] = random_pair(s, rng);
    const cplx lhs = eval_(g.apply(z)) * g.derivative(z) * g.derivative(z);
    const cplx rhs = eval_(z);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
  }
  return worst;
}

// ---------------------------------------------------------------- cusp expansion

cplx CuspExpansion::eval_reduced(cplx z) const {
  const cplx e1 = std::exp(cplx(0.0, kTwoPi / width) * z);
  cplx acc = 0.0;
  for (std::size_t n = coeffs.size(); n-- > 0;) acc = acc * e1 + coeffs[n];
  return acc * e1;
}

cplx CuspExpansion::operator()(cplx z) const {
  const auto red = surface->ford_reduce(z);
  const cplx d = red.element.derivative(z);
  return eval_reduced(red.point) * d * d;
}

CuspExpansion fit_cusp_expansion(std::shared_ptr<const FuchsianSurface> surface, int terms) {
  const double w = surface->cusp_width();
  const double ymin = surface->ford_min_height();
  if (terms <= 0) terms = std::clamp(static_cast<int>(std::ceil(5.1 * w / ymin)), 16, 400);
  const int rows = 2 * terms;
  const double y0 = 0.9 * ymin;

  Eigen::MatrixXcd v(rows, terms);
  for (int m = 0; m < rows; ++m) {
    const cplx z(w * ((m + 0.5) / rows - 0.5), y0);
    const auto red = surface->ford_reduce(z);
    const cplx d = red.element.derivative(z);
    const cplx factor = d * d;
    for (int n = 1; n <= terms; ++n) {
      const double scale = std::exp(kTwoPi * n * y0 / w);
      const cplx k(0.0, kTwoPi * n / w);
      v(m, n - 1) = scale * (std::exp(k * z) - factor * std::exp(k * red.point));
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(v, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double gap = sv(terms - 1) / sv(terms - 2);
  if (!(gap < 1e-6)) {
    throw Error(ErrorCode::DegenerateBasis,
                "cusp-form collocation has no clean one-dimensional null space (gap " + std::to_string(gap) + ")");
  }
  Eigen::VectorXcd null = svd.matrixV().col(terms - 1);
  const double top = null.cwiseAbs().maxCoeff();
  int lead = 0;
  while (std::abs(null(lead)) < 1e-6 * top) ++lead;
  CuspExpansion e;
  e.surface = std::move(surface);
  e.width = w;
  e.singular_gap = gap;
  e.coeffs.resize(terms);
  const cplx norm = null(lead) * std::exp(kTwoPi * (lead + 1) * y0 / w);
  for (int n = 1; n <= terms; ++n) {
    e.coeffs[n - 1] = null(n - 1) * std::exp(kTwoPi * n * y0 / w) / norm;
  }
  return e;
}

std::vector<std::shared_ptr<const QuadDifferential>> basis_quadratic(std::shared_ptr<const FuchsianSurface> s) {
  auto exp = std::make_shared<const CuspExpansion>(fit_cusp_expansion(s));
  Truncation t;
  t.terms = static_cast<int>(exp->coeffs.size());
  t.word_cap = s->table().max_word_len();
  // Truncation error of the expansion at the bottom of the Ford domain.
  double tail = 0.0;
  const double r = std::exp(-kTwoPi * s->ford_min_height() / exp->width);
  for (std::size_t n = 0; n < exp->coeffs.size(); ++n) tail = std::max(tail, std::abs(exp->coeffs[n]) * std::pow(r, n + 1));
  t.tail_estimate = tail * std::pow(r, 1.0 * exp->coeffs.size());
  QuadDifferential q([exp](cplx z) { return (*exp)(z); }, t, 0.0, "cusp-form");
  const double measured = q.automorphy_residual(*s, 40, 0x5eed);
  return {std::make_shared<const QuadDifferential>([exp](cplx z) { return (*exp)(z); }, t,
                                                   std::max(1e-9, 10.0 * measured), "cusp-form")};
}

// ---------------------------------------------------------------- relative Poincare series

RelativePoincareSeries::RelativePoincareSeries(const FuchsianSurface& s, const ClosedGeodesic& g, double radius)
    : surface_(std::make_shared<const FuchsianSurface>(s)), radius_(radius), length_(g.classical_length),
      center_(s.center()) {
  const auto sinv = g.axis.standardize.inverse();
  for (const auto& h : coset_reps(s, g, radius)) reps_.push_back(sinv * h);
}

PoincareValue RelativePoincareSeries::evaluate(cplx z) const {
  // Sum at the reduced point z0 = W^-1 z, where the truncation is centred, and
  // carry the value back with the weight-4 factor.
  const auto red = surface_->reduce_point(HPoint(z));
  const cplx z0 = red.point.z();
  const auto winv = surface_->element(red.word).inverse();
  const cplx dw = winv.derivative(z);
  const cplx factor = dw * dw;
  std::vector<cplx> terms(reps_.size());
  for (std::size_t k = 0; k < reps_.size(); ++k) {
    const auto& m = reps_[k];
    const cplx w = m.apply(z0);
    const cplx d = m.derivative(z0);
    terms[k] = d * d / (w * w);
  }
  const double dz = hyp_distance(center_, red.point);
  const double tail = 2.0 * (length_ / std::numbers::pi) * std::exp(-(radius_ - dz)) / (z0.imag() * z0.imag());
  return {pairwise_sum(terms) * factor, tail * std::abs(factor)};
}

PoincareValue rel_poincare_theta(const RelativePoincareSeries& series, cplx z, double tol) {
  if (!(z.imag() > 0.0)) throw Error(ErrorCode::InvalidPoint, "evaluation point outside H");
  auto v = series.evaluate(z);
  if (v.tail_estimate > tol * std::abs(v.value)) {
    throw Error(ErrorCode::TruncationTooSmall, "coset radius " + std::to_string(series.radius()) +
                                                   " leaves relative tail " +
                                                   std::to_string(v.tail_estimate / std::abs(v.value)));
  }
  return v;
}

// ---------------------------------------------------------------- harmonic Beltrami

HarmonicBeltrami::HarmonicBeltrami(std::vector<std::shared_ptr<const QuadDifferential>> basis, Eigen::VectorXcd coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.size()) != basis_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient count differs from basis size");
  }
}

HarmonicBeltrami HarmonicBeltrami::zero(std::vector<std::shared_ptr<const QuadDifferential>> basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  return {std::move(basis), Eigen::VectorXcd::Zero(n)};
}

cplx HarmonicBeltrami::lowered(cplx z) const {
  cplx s = 0.0;
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    if (coeffs_(k) != 0.0) s += coeffs_(k) * std::conj((*basis_[k])(z));
  }
  return s;
}

cplx HarmonicBeltrami::beta(cplx z) const { return 2.0 * z.imag() * z.imag() * lowered(z); }

HarmonicBeltrami HarmonicBeltrami::operator+(const HarmonicBeltrami& o) const {
  if (basis_.size() != o.basis_.size()) throw Error(ErrorCode::DimensionMismatch, "basis size mismatch");
  return {basis_, coeffs_ + o.coeffs_};
}

namespace {

std::vector<cplx> sample_nodes(const QuadratureMesh& mesh, const std::function<cplx(cplx)>& f) {
  std::vector<cplx> out(mesh.nodes.size());
  parallel_for(out.size(), [&](std::size_t i) { out[i] = f(mesh.nodes[i].point.z()); });
  return out;
}

}  // namespace

cplx beltrami_pairing(const BeltramiSample& mu, const QuadDifferential& q, bool force_mesh) {
  if (mu.exact_pairing && !force_mesh) return mu.exact_pairing(q);
  if (mu.mesh == nullptr || mu.values.size() != mu.mesh->nodes.size()) {
    throw Error(ErrorCode::DimensionMismatch, "Beltrami sample does not match its mesh");
  }
  const auto& nodes = mu.mesh->nodes;
  std::vector<cplx> terms(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t i) {
    if (mu.values[i] == 0.0) return;
    const double y = nodes[i].point.y();
    terms[i] = nodes[i].weight * y * y * mu.values[i] * q(nodes[i].point.z());
  });
  return pairwise_sum(terms);
}

Eigen::MatrixXcd quadratic_gram(const QuadratureMesh& mesh,
                                const std::vector<std::shared_ptr<const QuadDifferential>>& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::vector<std::vector<cplx>> vals;
  for (const auto& q : basis) vals.push_back(sample_nodes(mesh, [&](cplx z) { return (*q)(z); }));
  Eigen::MatrixXcd g(n, n);
  std::vector<cplx> terms(mesh.nodes.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const double y = mesh.nodes[i].point.y();
        terms[i] = mesh.nodes[i].weight * 2.0 * y * y * y * y * std::conj(vals[k][i]) * vals[j][i];
      }
      g(j, k) = pairwise_sum(terms);
    }
  }
  return g;
}

HarmonicBeltrami harmonic_projection(const QuadratureMesh& mesh,
                                     const std::vector<std::shared_ptr<const QuadDifferential>>& basis,
                                     const BeltramiSample& mu, bool force_mesh) {
  const Eigen::MatrixXcd g = quadratic_gram(mesh, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g);
  const auto& ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-13 * std::max(1.0, ev.maxCoeff()))) {
    throw Error(ErrorCode::SingularGram, "Gram matrix of the basis is singular");
  }
  Eigen::VectorXcd rhs(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j) rhs(j) = beltrami_pairing(mu, *basis[j], force_mesh);
  return {basis, g.ldlt().solve(rhs)};
}

cplx wp_gram(const QuadratureMesh& mesh, const HarmonicBeltrami& ai, const HarmonicBeltrami& aj) {
  if (ai.is_zero() || aj.is_zero()) return 0.0;
  std::vector<cplx> terms(mesh.nodes.size());
  parallel_for(terms.size(), [&](std::size_t i) {
    const cplx z = mesh.nodes[i].point.z();
    terms[i] = mesh.nodes[i].weight * ai.beta(z) * std::conj(aj.beta(z));
  });
  return pairwise_sum(terms);
}

SupNorm sup_norm(const QuadratureMesh& mesh, const HarmonicBeltrami& a) {
  if (a.is_zero()) return {0.0, 0.0, 0.0, mesh.nodes.empty() ? cplx(0.0, 1.0) : mesh.nodes.front().point.z()};
  std::vector<double> vals(mesh.nodes.size());
  parallel_for(vals.size(), [&](std::size_t i) { vals[i] = std::abs(a.beta(mesh.nodes[i].point.z())); });
  const auto it = std::max_element(vals.begin(), vals.end());
  const cplx z0 = mesh.nodes[it - vals.begin()].point.z();
  const double mesh_max = *it;
  auto f = [&](double x, double s) { return std::abs(a.beta(cplx(x, std::exp(s)))); };
  const auto best = maximize_2d(f, z0.real(), std::log(z0.imag()), 0.02 * std::min(1.0, z0.imag()), 1e-10);
  if (best.value > mesh_max) {
    return {best.value, mesh_max, best.value - mesh_max, cplx(best.x, std::exp(best.y))};
  }
  return {mesh_max, mesh_max, 0.0, z0};
}

cplx SurfaceField::integral() const {
  std::vector<cplx> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = mesh->nodes[i].weight * values[i];
  return pairwise_sum(terms);
}

SurfaceField constant_field(const QuadratureMesh& mesh, cplx c) {
  return {&mesh, std::vector<cplx>(mesh.nodes.size(), c), [c](cplx) { return c; }, {}};
}

SurfaceField pointwise_product(const QuadratureMesh& mesh, const HarmonicBeltrami& ai, const HarmonicBeltrami& aj) {
  auto eval = [ai, aj](cplx z) { return ai.beta(z) * std::conj(aj.beta(z)); };
  return {&mesh, sample_nodes(mesh, eval), eval, {}};
}

}  // namespace geolen
