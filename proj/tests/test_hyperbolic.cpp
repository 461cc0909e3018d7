#include <cmath>
#include <numbers>
#include <random>

#include <gsl/gsl_integration.h>
#include <gtest/gtest.h>

#include "geolen/hyperbolic.hpp"

using namespace geolen;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(1000);
  gsl_function fn;
  fn.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };
  fn.params = const_cast<std::function<double(double)>*>(&f);
  double result = 0.0, err = 0.0;
  gsl_integration_qag(&fn, a, b, 1e-14, 1e-13, 1000, GSL_INTEG_GAUSS61, ws, &result, &err);
  gsl_integration_workspace_free(ws);
  return result;
}

MobiusTransform random_sl2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    const double a = u(rng), b = u(rng), c = u(rng);
    if (std::abs(a) < 0.2) continue;
    return MobiusTransform(a, b, c, (1.0 + b * c) / a, 1e-9);
  }
}

HPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(-3.0, 3.0), t(-2.0, 2.0);
  return {x(rng), std::exp(t(rng))};
}

}  // namespace

TEST(HPoint, RejectsNonPositiveHeight) {
  EXPECT_THROW(HPoint(0.0, 0.0), Error);
  EXPECT_THROW(HPoint(1.0, -1.0), Error);
  try {
    HPoint(0.0, -2.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPoint);
  }
}

TEST(Mobius, DeterminantChecked) {
  EXPECT_THROW(MobiusTransform(1, 1, 1, 1), Error);
  const auto m = MobiusTransform::normalized(2, 1, 1, 3);
  EXPECT_NEAR(m.det(), 1.0, 1e-14);
}

TEST(Mobius, ApplyExamples) {
  const auto p = mobius_apply(MobiusTransform::identity(), HPoint(0, 1));
  EXPECT_EQ(p.x(), 0.0);
  EXPECT_EQ(p.y(), 1.0);
  const auto t = mobius_apply(MobiusTransform(1, 1, 0, 1), HPoint(0, 1));
  EXPECT_DOUBLE_EQ(t.x(), 1.0);
  EXPECT_DOUBLE_EQ(t.y(), 1.0);
  const auto s = mobius_apply(MobiusTransform(0, 1, -1, 0), HPoint(0, 2));
  EXPECT_NEAR(s.x(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.y(), 0.5);
}

TEST(Distance, Examples) {
  EXPECT_NEAR(hyp_distance({0, 1}, {0, 2}), std::log(2.0), 1e-15);
  EXPECT_EQ(hyp_distance({0.3, 0.7}, {0.3, 0.7}), 0.0);
}

TEST(Distance, MatchesArclengthAlongConnectingGeodesic) {
  // Geodesic through i and 1+2i: circle centred on the real axis at x = c.
  // |i - c|^2 = |1 + 2i - c|^2  =>  1 + c^2 = (1 - c)^2 + 4  =>  c = 2.
  const double c = 2.0, r = std::sqrt(5.0);
  const double th0 = std::atan2(1.0, 0.0 - c), th1 = std::atan2(2.0, 1.0 - c);
  // z = c + r e^{i th}: |dz| / y = r dth / (r sin th) = dth / sin th.
  const double arc = integrate([](double th) { return 1.0 / std::sin(th); }, th1, th0);
  EXPECT_NEAR(hyp_distance({0, 1}, {1, 2}), arc, 1e-12);
  EXPECT_NEAR(hyp_distance({0, 1}, {1, 2}), std::acosh(1.5), 1e-14);
}

TEST(Distance, TriangleInequalityAndIsometry) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const auto p = random_point(rng), q = random_point(rng), r = random_point(rng);
    EXPECT_LE(hyp_distance(p, r), hyp_distance(p, q) + hyp_distance(q, r) + 1e-12);
    const auto m = random_sl2(rng);
    const double d = hyp_distance(p, q);
    EXPECT_NEAR(hyp_distance(mobius_apply(m, p), mobius_apply(m, q)), d, 1e-10 * (1.0 + d));
  }
}

TEST(Classify, Examples) {
  const auto par = classify_and_length(MobiusTransform(1, 1, 0, 1));
  EXPECT_EQ(par.kind, ElementKind::Parabolic);
  EXPECT_EQ(par.classical_length, 0.0);
  const auto diag = classify_and_length(MobiusTransform(2, 0, 0, 0.5));
  EXPECT_EQ(diag.kind, ElementKind::Hyperbolic);
  EXPECT_NEAR(diag.classical_length, 2.0 * std::log(2.0), 1e-15);
  const auto mod = classify_and_length(MobiusTransform(1, 1, 1, 2));
  EXPECT_EQ(mod.kind, ElementKind::Hyperbolic);
  EXPECT_NEAR(mod.classical_length, static_cast<double>(2.0L * std::acosh(1.5L)), 1e-15);
  const double th = 0.4;
  const auto ell = classify_and_length(MobiusTransform(std::cos(th), -std::sin(th), std::sin(th), std::cos(th)));
  EXPECT_EQ(ell.kind, ElementKind::Elliptic);
  EXPECT_EQ(ell.classical_length, 0.0);
}

TEST(Classify, IdentityRejected) {
  try {
    classify_and_length(MobiusTransform::identity());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IdentityElement);
  }
  EXPECT_THROW(classify_and_length(MobiusTransform(-1, 0, 0, -1)), Error);
}

TEST(Classify, TraceInvariantUnderConjugation) {
  std::mt19937_64 rng(5);
  const MobiusTransform m(1, 1, 1, 2);
  for (int k = 0; k < 50; ++k) {
    const auto t = random_sl2(rng);
    const auto c = t * m * t.inverse();
    EXPECT_NEAR(classify_and_length(c).classical_length, classify_and_length(m).classical_length,
                1e-12 * (1.0 + std::abs(t.a()) + std::abs(t.b()) + std::abs(t.c()) + std::abs(t.d())));
  }
}

TEST(Axis, DiagonalIsImaginaryAxis) {
  const auto axis = axis_standardize(MobiusTransform(2, 0, 0, 0.5));
  EXPECT_TRUE(axis.standardize.projectively_equal(MobiusTransform::identity(), 1e-12));
  EXPECT_FALSE(axis.attracting.has_value());
  ASSERT_TRUE(axis.repelling.has_value());
  EXPECT_NEAR(*axis.repelling, 0.0, 1e-15);
}

TEST(Axis, FixedPointsSolveQuadratic) {
  const MobiusTransform m(1, 1, 1, 2);
  const auto axis = axis_standardize(m);
  // c z^2 + (d - a) z - b = 0  =>  z^2 + z - 1 = 0.
  const double r1 = (-1.0 + std::sqrt(5.0)) / 2.0, r2 = (-1.0 - std::sqrt(5.0)) / 2.0;
  ASSERT_TRUE(axis.attracting && axis.repelling);
  const double lo = std::min(*axis.attracting, *axis.repelling), hi = std::max(*axis.attracting, *axis.repelling);
  EXPECT_NEAR(lo, r2, 1e-14);
  EXPECT_NEAR(hi, r1, 1e-14);
  const auto d = axis.standardize.inverse() * m * axis.standardize;
  EXPECT_NEAR(d.b(), 0.0, 1e-10);
  EXPECT_NEAR(d.c(), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(d.a()), std::exp(axis.classical_length / 2), 1e-10);
}

TEST(Axis, NotHyperbolicRejected) {
  try {
    axis_standardize(MobiusTransform(1, 1, 0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHyperbolic);
  }
}

TEST(Axis, RandomConjugatesStandardize) {
  std::mt19937_64 rng(17);
  const MobiusTransform m(3, 0, 0, 1.0 / 3.0);
  for (int k = 0; k < 50; ++k) {
    const auto t = random_sl2(rng);
    const auto c = t * m * t.inverse();
    const auto axis = axis_standardize(c);
    EXPECT_NEAR(axis.classical_length, 2.0 * std::log(3.0), 1e-9);
    const auto d = axis.standardize.inverse() * c * axis.standardize;
    const double scale = std::abs(d.a()) + std::abs(d.d());
    EXPECT_LT(std::abs(d.b()) / scale, 1e-10);
    EXPECT_LT(std::abs(d.c()) / scale, 1e-10);
  }
}

TEST(UnitSpeed, RiemannianAtI) {
  const auto axis = axis_standardize(MobiusTransform(2, 0, 0, 0.5));
  const auto s = unit_speed_point(axis, 0.0, NormConvention::Riemannian);
  EXPECT_NEAR(s.point.x(), 0.0, 1e-15);
  EXPECT_NEAR(s.point.y(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(s.velocity), 1.0, 1e-14);
}

TEST(UnitSpeed, SpeedAndPeriodInBothConventions) {
  const auto axis = axis_standardize(MobiusTransform(1, 1, 1, 2));
  for (auto conv : {NormConvention::Hermitian, NormConvention::Riemannian}) {
    const double weight = conv == NormConvention::Hermitian ? 1.0 : 2.0;
    const double period = axis.period(conv);
    for (double t : {0.0, 0.3, 1.1, period}) {
      const auto s = unit_speed_point(axis, t, conv);
      EXPECT_NEAR(weight * MetricDensity::g(s.point) * std::norm(s.velocity), 1.0, 1e-12);
    }
    const auto p0 = unit_speed_point(axis, 0.0, conv).point;
    const auto p1 = unit_speed_point(axis, period, conv).point;
    const auto image = mobius_apply(axis.element, p0);
    EXPECT_NEAR(hyp_distance(p1, image), 0.0, 1e-7);
  }
  // Independent length integral along the standardized axis: int sqrt(g) |dz| from i to i e^L.
  const double herm = integrate([](double y) { return std::sqrt(0.5) / y; }, 1.0, std::exp(axis.classical_length));
  EXPECT_NEAR(axis.period(NormConvention::Hermitian), herm, 1e-12);
  EXPECT_NEAR(axis.period(NormConvention::Hermitian), axis.classical_length / std::numbers::sqrt2, 1e-15);
}

TEST(Metric, CurvatureIdentityByFiniteDifferences) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> x(-2.0, 2.0), y(0.5, 2.0);
  auto log_g = [](long double y) { return -std::log(2.0L) - 2.0L * std::log(y); };
  const long double h = 1e-4L;
  for (int k = 0; k < 100; ++k) {
    const HPoint p(x(rng), y(rng));
    // log g depends on y only: d_z d_zbar = (1/4) d_yy. Fourth-order stencil.
    const long double yy = p.y();
    const long double d2 = (-log_g(yy + 2 * h) + 16 * log_g(yy + h) - 30 * log_g(yy) + 16 * log_g(yy - h) -
                            log_g(yy - 2 * h)) /
                           (12 * h * h);
    const double defect = static_cast<double>(0.25L * d2) - MetricDensity::g(p);
    EXPECT_LT(std::abs(defect), 1e-10);
    EXPECT_LT(std::abs(MetricDensity::curvature_defect(p)), 1e-10);
    EXPECT_NEAR(MetricDensity::log_g(p), std::log(MetricDensity::g(p)), 1e-14);
  }
}
