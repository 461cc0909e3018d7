#include <cmath>
#include <numbers>

#include <gsl/gsl_integration.h>
#include <gtest/gtest.h>

#include "geolen/resolvent.hpp"

using namespace geolen;

namespace {

struct Fixture {
  std::shared_ptr<const FuchsianSurface> surface =
      std::make_shared<const FuchsianSurface>(FuchsianSurface::modular());
  std::vector<std::shared_ptr<const QuadDifferential>> basis = basis_quadratic(surface);
  QuadratureMesh data = build_mesh(*surface, 48, 1e7);
  QuadratureMesh field = build_mesh(*surface, 12, 1e7);
  HarmonicBeltrami a{basis, Eigen::VectorXcd::Ones(1)};
  Resolvent resolvent;
  SurfaceField chi = pointwise_product(data, a, a);
  SurfaceField phi = phi_field(resolvent, field, data, a, a);
  SupNorm sup = sup_norm(data, a);
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

double kernel_mass(double r) {
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(1000);
  gsl_function fn;
  fn.function = [](double d, void*) { return 2.0 * std::numbers::pi * free_kernel(d) * std::sinh(d); };
  fn.params = nullptr;
  double result = 0.0, err = 0.0;
  gsl_integration_qags(&fn, 0.0, r, 1e-14, 1e-12, 1000, ws, &result, &err);
  gsl_integration_workspace_free(ws);
  return result;
}

}  // namespace

TEST(Kernel, LegendreQ1ClosedForm) {
  const long double x = 2.0L;
  const long double q = x / 2 * std::log((x + 1) / (x - 1)) - 1;
  EXPECT_NEAR(legendre_q1(2.0), static_cast<double>(q), 1e-15);
  EXPECT_NEAR(legendre_q1(2.0), std::log(3.0) - 1.0, 1e-15);
  EXPECT_NEAR(legendre_q1_cosh(std::acosh(2.0)), std::log(3.0) - 1.0, 1e-14);
  for (double d : {1e-6, 1e-3, 0.1, 1.0, 5.0}) {
    const long double c = std::cosh(static_cast<long double>(d));
    const long double ref = c / 2 * std::log((c + 1) / (c - 1)) - 1;
    EXPECT_NEAR(legendre_q1_cosh(d), static_cast<double>(ref), 1e-9 * static_cast<double>(std::abs(ref))) << d;
  }
}

TEST(Kernel, DecayRate) {
  const double ratio = free_kernel(11.0) / free_kernel(10.0);
  EXPECT_NEAR(ratio / std::exp(-2.0), 1.0, 0.2);
}

TEST(Kernel, LogarithmicSingularity) {
  const double slope = (free_kernel(1e-8) - free_kernel(1e-7)) / std::log(10.0);
  EXPECT_NEAR(slope / GreenKernel::kappa, 1.0, 0.05);
}

TEST(Kernel, PositiveDecreasingAndRejectsNonPositive) {
  double prev = free_kernel(1e-6);
  for (double d = 1e-3; d < 20.0; d *= 1.3) {
    const double k = free_kernel(d);
    EXPECT_GT(k, 0.0);
    EXPECT_LT(k, prev);
    prev = k;
  }
  for (double d : {0.0, -1.0}) {
    try {
      free_kernel(d);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NonPositiveDistance);
    }
  }
}

TEST(Kernel, UnitMassFixesNormalization) {
  // (box + 1) 1 = 1 forces the kernel to integrate to one over H.
  EXPECT_NEAR(kernel_mass(40.0), 1.0, 1e-9);
  for (double r : {1.0, 3.0, 8.0}) {
    EXPECT_NEAR(GreenKernel::mass_within(r), kernel_mass(r), 1e-9) << r;
    EXPECT_NEAR(GreenKernel::mass_within(r) + GreenKernel::tail_mass(r), 1.0, 1e-12);
  }
}

TEST(Resolvent, ReproducesConstants) {
  const auto& f = fx();
  const auto one = constant_field(f.data, 1.0);
  for (const auto& z : core_probes(f.field, 50)) {
    EXPECT_NEAR(std::abs(f.resolvent.apply(one, z).value - 1.0), 0.0, 1e-3);
  }
}

TEST(Resolvent, CutoffTooSmall) {
  const auto& f = fx();
  ResolventOptions o;
  o.cutoff = 3.0;
  try {
    apply_resolvent(f.chi, HPoint(0.1, 1.2), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CutoffTooSmall);
  }
  o.cutoff = 2.0;
  EXPECT_THROW(Resolvent{o}, Error);
}

TEST(Resolvent, CutoffDoublingWithinTail) {
  const auto& f = fx();
  ResolventOptions o;
  o.cutoff = 20.0;
  const Resolvent wide(o);
  for (const cplx z : {cplx(0.1, 1.1), cplx(0.4, 2.0), cplx(-0.3, 0.9)}) {
    const auto v1 = f.resolvent.apply(f.chi, z), v2 = wide.apply(f.chi, z);
    EXPECT_LT(std::abs(v1.value - v2.value), v1.tail_bound);
  }
}

TEST(Phi, PositivityMaximumPrincipleAndReality) {
  const auto& f = fx();
  double chi_max = 0.0;
  for (const auto& v : f.chi.values) chi_max = std::max(chi_max, v.real());
  const double bound = f.sup.value * f.sup.value;
  for (const auto& v : f.phi.values) {
    EXPECT_GE(v.real(), 0.0);
    EXPECT_LT(std::abs(v.imag()), 1e-14);
    EXPECT_LE(v.real(), bound * (1.0 + 1e-3));
    EXPECT_LE(v.real(), chi_max * (1.0 + 1e-3));
  }
}

TEST(Phi, ZeroDirectionGivesZeroField) {
  const auto& f = fx();
  const auto z = phi_field(f.resolvent, f.field, f.data, f.a, HarmonicBeltrami::zero(f.basis));
  for (const auto& v : z.values) EXPECT_EQ(v, cplx(0.0));
}

TEST(Phi, IntegralMatchesWeilPetersson) {
  const auto& f = fx();
  const double wp = wp_gram(f.data, f.a, f.a).real();
  EXPECT_LT(std::abs(f.phi.integral().real() - wp) / wp, 5e-3);
}

TEST(Phi, DeckInvariantEvaluator) {
  const auto& f = fx();
  const cplx z(0.15, 1.05);
  const double v = f.phi(z).real();
  for (std::size_t i : {1u, 6u}) {
    EXPECT_NEAR(f.phi(f.surface->table()[i].element.apply(z)).real(), v, 1e-3 * v);
  }
}

TEST(Pde, ConstantFieldsHaveZeroResidual) {
  const auto& f = fx();
  const auto c = constant_field(f.field, 0.7);
  const auto rep = verify_pde(c, c, core_probes(f.field, 10));
  EXPECT_LT(rep.max_relative, 1e-12);
}

TEST(Pde, PhiSatisfiesEquationAndPerturbationIsFlagged) {
  const auto& f = fx();
  const auto probes = core_probes(f.field, 12);
  const auto rep = verify_pde(f.phi, f.chi, probes);
  EXPECT_LT(rep.mean_relative, 1e-2);

  const cplx target = probes.front();
  SurfaceField bumped = f.phi;
  bumped.eval_anchored = nullptr;
  bumped.eval = [&, target](cplx z) {
    const double d = hyp_distance(HPoint(z), HPoint(target));
    return f.phi.eval_anchored(z, target) * (1.0 + 0.1 * std::exp(-d * d / 0.02));
  };
  const auto flagged = verify_pde(bumped, f.chi, {target});
  EXPECT_GT(flagged.max_relative, 10.0 * rep.max_relative);
  EXPECT_GT(flagged.max_relative, 0.05);
}

TEST(Resolvent, SelfAdjointUnderHyperbolicMeasure) {
  const auto& f = fx();
  const double s2 = f.sup.value * f.sup.value;
  SurfaceField chi2;
  chi2.mesh = &f.data;
  chi2.eval = [a = f.a, s2](cplx z) {
    const double b = std::norm(a.beta(z)) / s2;
    return cplx(b * b * s2, 0.0);
  };
  for (const auto& n : f.data.nodes) chi2.values.push_back(chi2.eval(n.point.z()));
  const auto phi2 = resolve_field(f.resolvent, f.field, chi2);
  cplx lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < f.field.nodes.size(); ++i) {
    const auto& n = f.field.nodes[i];
    lhs += n.weight * f.phi.values[i] * std::conj(chi2.eval(n.point.z()));
    rhs += n.weight * f.chi.eval(n.point.z()) * std::conj(phi2.values[i]);
  }
  EXPECT_LT(std::abs(lhs - rhs) / std::abs(lhs), 1e-2);
}

TEST(P1, PositiveMonotoneAndFrozen) {
  const auto& f = fx();
  const double wide = p1_empirical(*f.surface, f.phi, f.chi, 1.5);
  const double mid = p1_empirical(*f.surface, f.phi, f.chi, 1.0);
  const double narrow = p1_empirical(*f.surface, f.phi, f.chi, 0.6);
  EXPECT_GT(wide, 0.0);
  EXPECT_GE(mid, wide);
  EXPECT_GE(narrow, mid);
  EXPECT_NEAR(mid, 0.13515, 2e-4);
}
