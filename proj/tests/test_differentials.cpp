#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "geolen/differentials.hpp"

using namespace geolen;

namespace {

struct Fixture {
  std::shared_ptr<const FuchsianSurface> surface =
      std::make_shared<const FuchsianSurface>(FuchsianSurface::modular());
  std::vector<std::shared_ptr<const QuadDifferential>> basis = basis_quadratic(surface);
  QuadratureMesh mesh = build_mesh(*surface, 48, 1e7);
  HarmonicBeltrami a{basis, Eigen::VectorXcd::Ones(1)};
  ClosedGeodesic alpha = geodesic_representative(*surface, Word::parse("A"));
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

Eigen::VectorXcd scalar(cplx c) {
  Eigen::VectorXcd v(1);
  v(0) = c;
  return v;
}

std::vector<cplx> random_core_points(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> x(-0.45, 0.45), y(0.9, 1.6);
  std::vector<cplx> out;
  for (int k = 0; k < n; ++k) out.emplace_back(x(rng), y(rng));
  return out;
}

BeltramiSample sample_of(const QuadratureMesh& mesh, const HarmonicBeltrami& h) {
  BeltramiSample s;
  s.mesh = &mesh;
  for (const auto& n : mesh.nodes) s.values.push_back(h.beta(n.point.z()));
  return s;
}

}  // namespace

TEST(PoincareSeries, Automorphy) {
  const auto& f = fx();
  const RelativePoincareSeries series(*f.surface, f.alpha, 6.0);
  std::mt19937_64 rng(4);
  const auto& table = f.surface->table();
  std::uniform_int_distribution<std::size_t> pick(1, std::min<std::size_t>(table.size() - 1, 52));
  for (const auto& z : random_core_points(rng, 20)) {
    const auto& g = table[pick(rng)].element;
    const cplx lhs = series.evaluate(g.apply(z)).value * g.derivative(z) * g.derivative(z);
    const cplx rhs = series.evaluate(z).value;
    EXPECT_LT(std::abs(lhs - rhs) / std::abs(rhs), 1e-5);
  }
}

TEST(PoincareSeries, CyclicSubgroupInvariance) {
  const auto& f = fx();
  const RelativePoincareSeries series(*f.surface, f.alpha, 4.0);
  const auto& g0 = f.alpha.element;
  for (const cplx z : {cplx(0.1, 1.2), cplx(-0.3, 0.9)}) {
    const cplx lhs = series.evaluate(g0.apply(z)).value * g0.derivative(z) * g0.derivative(z);
    EXPECT_LT(std::abs(lhs - series.evaluate(z).value), 1e-9 * std::abs(series.evaluate(z).value));
  }
}

TEST(PoincareSeries, RadiusDoublingWithinTail) {
  const auto& f = fx();
  for (double r : {3.0, 4.0}) {
    const RelativePoincareSeries small(*f.surface, f.alpha, r), big(*f.surface, f.alpha, 2 * r);
    EXPECT_LE(small.cosets(), big.cosets());
    for (const cplx z : {cplx(0.1, 1.2), cplx(0.4, 0.95)}) {
      const auto v1 = small.evaluate(z), v2 = big.evaluate(z);
      EXPECT_LT(std::abs(v1.value - v2.value), v1.tail_estimate) << r;
    }
  }
}

TEST(PoincareSeries, TruncationTooSmall) {
  const auto& f = fx();
  const RelativePoincareSeries series(*f.surface, f.alpha, 2.0);
  try {
    rel_poincare_theta(series, cplx(0.1, 1.2), 1e-8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncationTooSmall);
  }
}

TEST(Basis, OneDimensionalAndProportionalToPoincareSeries) {
  const auto& f = fx();
  ASSERT_EQ(f.basis.size(), 1u);
  const RelativePoincareSeries sa(*f.surface, f.alpha, 8.0);
  const auto beta = geodesic_representative(*f.surface, Word::parse("B"));
  const RelativePoincareSeries sb(*f.surface, beta, 8.0);
  std::mt19937_64 rng(8);
  const auto pts = random_core_points(rng, 12);
  const cplx ra = sa.evaluate(pts[0]).value / (*f.basis[0])(pts[0]);
  const cplx rb = sb.evaluate(pts[0]).value / (*f.basis[0])(pts[0]);
  for (const auto& z : pts) {
    EXPECT_LT(std::abs(sa.evaluate(z).value / (*f.basis[0])(z) / ra - 1.0), 1e-5);
    EXPECT_LT(std::abs(sb.evaluate(z).value / (*f.basis[0])(z) / rb - 1.0), 1e-5);
  }
}

TEST(Basis, GramPositiveAndNonZero) {
  const auto& f = fx();
  const auto gram = quadratic_gram(f.mesh, f.basis);
  ASSERT_EQ(gram.rows(), 1);
  EXPECT_GT(gram(0, 0).real(), 0.0);
  EXPECT_LT(std::abs(gram(0, 0).imag()), 1e-12 * gram(0, 0).real());
  double m = 0.0;
  for (const auto& n : f.mesh.nodes) m = std::max(m, std::abs((*f.basis[0])(n.point.z())));
  EXPECT_GT(m, 1e-3);
}

TEST(Basis, AutomorphyResidualBelowDeclaredBound) {
  const auto& f = fx();
  for (const auto& q : f.basis) EXPECT_LE(q->automorphy_residual(*f.surface, 100, 77), q->residual_bound());
}

TEST(Beltrami, ModulusIsDeckInvariant) {
  const auto& f = fx();
  std::mt19937_64 rng(12);
  const auto& table = f.surface->table();
  for (const auto& z : random_core_points(rng, 30)) {
    for (std::size_t i : {1u, 3u, 7u, 20u, 51u}) {
      const cplx gz = table[i].element.apply(z);
      EXPECT_NEAR(f.a.norm_pointwise(gz), f.a.norm_pointwise(z), 1e-6 * (1.0 + f.a.norm_pointwise(z)));
    }
  }
}

TEST(Beltrami, Conventions) {
  const auto& f = fx();
  const cplx z(0.2, 1.1);
  const cplx q = (*f.basis[0])(z);
  EXPECT_LT(std::abs(f.a.lowered(z) - std::conj(q)), 1e-15);
  EXPECT_LT(std::abs(f.a.beta(z) - std::conj(q) * 2.0 * z.imag() * z.imag()), 1e-14);
}

TEST(Projection, IdempotentZeroAndLinear) {
  const auto& f = fx();
  for (cplx c : {cplx(1.0, 0.0), cplx(0.3, -2.0)}) {
    const auto h = f.a.scaled(c);
    const auto p = harmonic_projection(f.mesh, f.basis, sample_of(f.mesh, h));
    EXPECT_LT(std::abs(p.coeffs()(0) - c), 1e-8 * std::abs(c));
  }
  BeltramiSample zero;
  zero.mesh = &f.mesh;
  zero.values.assign(f.mesh.nodes.size(), 0.0);
  EXPECT_LT(harmonic_projection(f.mesh, f.basis, zero).coeffs().norm(), 1e-15);

  // A non-harmonic sample: beta times a smooth function of the height.
  BeltramiSample mu;
  mu.mesh = &f.mesh;
  for (const auto& n : f.mesh.nodes) mu.values.push_back(f.a.beta(n.point.z()) * std::exp(-n.local_height));
  BeltramiSample mu2 = mu;
  for (auto& v : mu2.values) v *= cplx(0.0, 1.0) * std::conj(v) / (std::abs(v) + 1.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int k = 0; k < 5; ++k) {
    const cplx s(g(rng), g(rng)), t(g(rng), g(rng));
    BeltramiSample comb = mu;
    for (std::size_t i = 0; i < comb.values.size(); ++i) comb.values[i] = s * mu.values[i] + t * mu2.values[i];
    const auto p = harmonic_projection(f.mesh, f.basis, comb).coeffs()(0);
    const auto p1 = harmonic_projection(f.mesh, f.basis, mu).coeffs()(0);
    const auto p2 = harmonic_projection(f.mesh, f.basis, mu2).coeffs()(0);
    EXPECT_LT(std::abs(p - (s * p1 + t * p2)), 1e-12 * (1.0 + std::abs(p)));
  }
  const auto pp = harmonic_projection(f.mesh, f.basis, mu);
  const auto again = harmonic_projection(f.mesh, f.basis, sample_of(f.mesh, pp));
  EXPECT_LT(std::abs(again.coeffs()(0) - pp.coeffs()(0)), 1e-8 * std::abs(pp.coeffs()(0)));
}

TEST(WeilPetersson, PositiveHermitianSesquilinear) {
  const auto& f = fx();
  const double aa = wp_gram(f.mesh, f.a, f.a).real();
  EXPECT_GT(aa, 0.0);
  const cplx c(0.7, -1.3);
  EXPECT_LT(std::abs(wp_gram(f.mesh, f.a.scaled(c), f.a) - c * aa), 1e-12);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int k = 0; k < 10; ++k) {
    const auto ai = f.a.scaled(cplx(g(rng), g(rng)));
    const auto aj = f.a.scaled(cplx(g(rng), g(rng)));
    const cplx ij = wp_gram(f.mesh, ai, aj), ji = wp_gram(f.mesh, aj, ai);
    EXPECT_LT(std::abs(ij - std::conj(ji)), 1e-10);
    EXPECT_LE(std::norm(ij),
              wp_gram(f.mesh, ai, ai).real() * wp_gram(f.mesh, aj, aj).real() * (1.0 + 1e-12));
  }
}

TEST(WeilPetersson, FrozenNormAfterRefinement) {
  const auto& f = fx();
  std::vector<double> values;
  for (int cells : {108, 192, 432}) values.push_back(wp_gram(build_mesh(*f.surface, cells, 1e7), f.a, f.a).real());
  for (std::size_t k = 1; k < values.size(); ++k) {
    EXPECT_LT(std::abs(values[k] - values[k - 1]) / values[k], 1e-3);
  }
  EXPECT_NEAR(values.back(), 0.155968, 1e-5);
}

TEST(SupNorm, ZeroScalingAndRefinement) {
  const auto& f = fx();
  EXPECT_EQ(sup_norm(f.mesh, HarmonicBeltrami::zero(f.basis)).value, 0.0);
  const auto s = sup_norm(f.mesh, f.a);
  EXPECT_GT(s.value, 0.0);
  EXPECT_NEAR(sup_norm(f.mesh, f.a.scaled(cplx(0.0, -3.0))).value, 3.0 * s.value, 1e-10);
  EXPECT_GE(s.value, s.mesh_max);
  double prev = s.mesh_max;
  double prev_unc = s.uncertainty;
  for (int cells : {108, 192}) {
    const auto r = sup_norm(build_mesh(*f.surface, cells, 1e7), f.a);
    EXPECT_GE(r.mesh_max, prev - prev_unc);
    EXPECT_NEAR(r.value, s.value, s.uncertainty);
    prev = r.mesh_max;
    prev_unc = r.uncertainty;
  }
}

TEST(PointwiseProduct, Examples) {
  const auto& f = fx();
  const auto aa = pointwise_product(f.mesh, f.a, f.a);
  for (std::size_t i = 0; i < f.mesh.nodes.size(); ++i) {
    EXPECT_GE(aa.values[i].real(), 0.0);
    EXPECT_EQ(aa.values[i].imag(), 0.0);
  }
  const auto z = pointwise_product(f.mesh, f.a, HarmonicBeltrami::zero(f.basis));
  for (const auto& v : z.values) EXPECT_EQ(v, cplx(0.0));
  const auto ab = pointwise_product(f.mesh, f.a, f.a.scaled(cplx(0.0, 2.0)));
  const cplx p(0.15, 1.05);
  EXPECT_LT(std::abs(ab(p) - f.a.beta(p) * std::conj(cplx(0.0, 2.0) * f.a.beta(p))), 1e-14);
  const auto& table = f.surface->table();
  for (std::size_t i : {2u, 9u, 33u}) {
    const cplx gp = table[i].element.apply(p);
    EXPECT_NEAR(aa(gp).real(), aa(p).real(), 1e-6 * (1.0 + aa(p).real()));
  }
}
