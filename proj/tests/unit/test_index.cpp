#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace daelab;
using namespace daelab::testing;

namespace {

Matrix m2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const Matrix kI2 = Matrix::Identity(2, 2);

FitOptions window(Ray ray, double omega, double lo, double hi) {
  FitOptions o;
  o.ray = ray;
  o.omega = omega;
  o.r_min = lo;
  o.r_max = hi;
  return o;
}

}  // namespace

TEST(AlgebraicIndex, Examples) {
  EXPECT_EQ(algebraic_index(Pencil(kI2, Matrix::Zero(2, 2))), 0);
  EXPECT_EQ(algebraic_index(Pencil(m2(1, 0, 0, 0), kI2)), 1);
  EXPECT_EQ(algebraic_index(Pencil(m2(0, 1, 0, 0), kI2)), 2);
}

TEST(AlgebraicIndex, ShiftInvariant) {
  Rng rng(51);
  for (int t = 0; t < 20; ++t) {
    const auto c = weierstrass_pencil(rng, 5, t % 4);
    const Pencil shifted(c.pencil.E(), c.pencil.A() - 2.5 * c.pencil.E());
    EXPECT_EQ(algebraic_index(shifted), algebraic_index(c.pencil));
  }
}

TEST(FitResolventIndex, NilpotentGrowsLinearly) {
  const IndexReport r = fit_resolvent_index(Pencil(m2(0, 1, 0, 0), kI2), window(Ray::real_ray, 0.0, 1.0, 1e4));
  EXPECT_NEAR(r.fitted_exponent, 1.0, 0.05);
  EXPECT_EQ(r.fitted_index, 2);
  ASSERT_TRUE(r.algebraic_index.has_value());
  EXPECT_EQ(*r.algebraic_index, 2);
}

TEST(FitResolventIndex, ScalarDecay) {
  Matrix e(1, 1), a(1, 1);
  e << 1.0;
  a << -1.0;
  const IndexReport r = fit_resolvent_index(Pencil(e, a), window(Ray::real_ray, 0.0, 1.0, 1e4));
  EXPECT_NEAR(r.fitted_exponent, -1.0, 0.05);
  EXPECT_EQ(r.fitted_index, 0);
}

TEST(FitResolventIndex, SemiExplicitIsIndexOne) {
  const IndexReport r = fit_resolvent_index(Pencil(m2(1, 0, 0, 0), -kI2), window(Ray::real_ray, 0.0, 1.0, 1e4));
  EXPECT_NEAR(r.fitted_exponent, 0.0, 0.05);
  EXPECT_EQ(r.fitted_index, 1);
}

TEST(FitResolventIndex, SamplesRespectOmega) {
  const Pencil p(m2(1, 0, 0, 0), -kI2);
  for (Ray ray : {Ray::real_ray, Ray::vertical_line}) {
    const IndexReport r = fit_resolvent_index(p, window(ray, 2.0, 1.0, 100.0));
    for (const auto& s : r.samples) {
      EXPECT_GE(s.lambda.real(), r.omega);
      if (ray == Ray::real_ray) {
        EXPECT_EQ(s.lambda.imag(), 0.0);
        EXPECT_GT(s.lambda.real(), r.omega);
      }
      EXPECT_GE(s.condition, 1.0);
    }
    EXPECT_EQ(r.fitted_index, index_from_exponent(r.fitted_exponent));
  }
}

TEST(FitResolventIndex, GrowthConstantBoundsEverySample) {
  const IndexReport r = fit_resolvent_index(Pencil(m2(0, 1, 0, 0), kI2), window(Ray::vertical_line, 1.0, 1.0, 1e3));
  const double pm1 = static_cast<double>(r.fitted_index - 1);
  for (const auto& s : r.samples) {
    EXPECT_LE(s.norm, r.growth_constant * std::pow(std::abs(s.lambda), pm1) * (1 + 1e-12));
    EXPECT_LE(s.norm, r.node_growth_constant * (1 + std::pow(std::abs(s.lambda), pm1)) * (1 + 1e-12));
  }
}

TEST(FitResolventIndex, RejectsBadWindow) {
  const Pencil p(kI2, Matrix::Zero(2, 2));
  EXPECT_THROW(fit_resolvent_index(p, window(Ray::real_ray, 0.0, 0.5, 10.0)), Error);
  EXPECT_THROW(fit_resolvent_index(p, window(Ray::real_ray, 0.0, 10.0, 10.0)), Error);
  FitOptions o = window(Ray::real_ray, 0.0, 1.0, 10.0);
  o.count = 4;
  EXPECT_THROW(fit_resolvent_index(p, o), Error);
}

TEST(FitResolventIndex, SingularSampleNamesLambda) {
  // eigenvalue 3 is the first sample when ω is forced to 0 and r_min = 3
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = -1.0;
  FitOptions o = window(Ray::real_ray, 0.0, 3.0, 30.0);
  o.precision = Precision::standard;
  try {
    fit_resolvent_index(Pencil(Matrix::Identity(2, 2), a), o);
    FAIL();
  } catch (const NotInResolventSetError& err) {
    EXPECT_NEAR(std::abs(err.lambda() - 3.0), 0.0, 1e-12);
    EXPECT_GT(err.condition(), kSingularConditionThreshold);
  }
}

TEST(FitResolventIndex, WeierstrassPencilsMatchAlgebraicIndex) {
  Rng rng(61);
  for (int t = 0; t < 25; ++t) {
    const Index k = t % 5;
    const auto c = weierstrass_pencil(rng, uniform_int(rng, std::max(1, static_cast<int>(k)), 6), k);
    FitOptions o;
    o.r_min = 1e2;
    o.r_max = 1e6;
    const IndexReport r = fit_resolvent_index(c.pencil, o);
    EXPECT_EQ(r.fitted_index, k);
    EXPECT_EQ(*r.algebraic_index, k);
    EXPECT_LT(std::abs(r.fitted_exponent - static_cast<double>(k - 1)), 0.25);
  }
}

TEST(FiniteEigenvalues, DeflatedSpectrum) {
  Matrix e = Matrix::Zero(3, 3), a = Matrix::Zero(3, 3);
  e(0, 0) = 1;
  e(1, 1) = 1;
  a(0, 0) = -2;
  a(1, 1) = 0.5;
  a(2, 2) = 1;
  auto ev = finite_eigenvalues(Pencil(e, a));
  ASSERT_EQ(ev.size(), 2u);
  std::sort(ev.begin(), ev.end(), [](Complex x, Complex y) { return x.real() < y.real(); });
  EXPECT_NEAR(std::abs(ev[0] - Complex(-2.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(ev[1] - Complex(0.5)), 0.0, 1e-12);
  EXPECT_NEAR(default_omega(Pencil(e, a)), 1.5, 1e-12);
}

TEST(CheckIndexBound, Examples) {
  const IndexReport r = fit_resolvent_index(Pencil(m2(0, 1, 0, 0), kI2), window(Ray::real_ray, 0.0, 1.0, 1e4));
  EXPECT_TRUE(check_index_bound(r, 3));
  EXPECT_FALSE(check_index_bound(r, 1));
  const IndexReport id = fit_resolvent_index(Pencil(kI2, Matrix::Zero(2, 2)), window(Ray::real_ray, 1.0, 1.0, 1e4));
  EXPECT_TRUE(check_index_bound(id, 0));
}
