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

const Matrix kNil = m2(0, 1, 0, 0);
const Matrix kI2 = Matrix::Identity(2, 2);

}  // namespace

TEST(Resolvent, IdentityPencilAtOne) {
  const Matrix r = resolvent(Pencil(kI2, Matrix::Zero(2, 2)), 1.0);
  EXPECT_LT((r - kI2).norm(), 1e-15);
}

TEST(Resolvent, NilpotentClosedForm) {
  // (λN − I)⁻¹ = −I − λN
  const Matrix r = resolvent(Pencil(kNil, kI2), 5.0);
  EXPECT_LT((r - m2(-1, -5, 0, -1)).norm(), 1e-14);
}

TEST(Resolvent, ZeroPencilIsRejected) {
  const Pencil p(Matrix::Zero(2, 2), Matrix::Zero(2, 2));
  try {
    resolvent(p, 1.0);
    FAIL() << "expected NotInResolventSet";
  } catch (const NotInResolventSetError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInResolventSet);
    EXPECT_EQ(e.lambda(), Complex(1.0));
  }
}

TEST(Resolvent, RectangularIsRefused) {
  const Pencil p(Matrix::Zero(2, 3), Matrix::Zero(2, 3));
  EXPECT_THROW(resolvent(p, 1.0), Error);
}

TEST(Resolvent, ResidualContract) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const Pencil p = random_singular_pencil(rng, 5, 3);
    const Complex lambda = random_resolvent_point(rng, p);
    const Matrix m = lambda * p.E() - p.A();
    for (Precision prec : {Precision::standard, Precision::extended}) {
      const Matrix r = resolvent(p, lambda, prec);
      const double res = linalg::largest_singular_value(m * r - Matrix::Identity(5, 5));
      EXPECT_LE(res, 1e-10 * linalg::largest_singular_value(m) * linalg::largest_singular_value(r));
    }
  }
}

TEST(Resolvent, PseudoResolventIdentity) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Pencil p = random_singular_pencil(rng, 4, 2);
    const Complex l = random_resolvent_point(rng, p);
    const Complex mu = random_resolvent_point(rng, p);
    const Matrix rl = resolvent(p, l), rm = resolvent(p, mu);
    const Matrix lhs = rl - rm;
    const Matrix rhs = (mu - l) * rl * p.E() * rm;
    EXPECT_LE((lhs - rhs).norm(), 1e-9 * std::max(1.0, lhs.norm()));
  }
}

TEST(Resolvent, WideAndStandardAgreeWhenWellConditioned) {
  Rng rng(12);
  const Pencil p = random_singular_pencil(rng, 6, 4);
  const Complex lambda = random_resolvent_point(rng, p);
  const Matrix a = resolvent(p, lambda, Precision::standard);
  const Matrix b = resolvent(p, lambda, Precision::extended);
  EXPECT_LT((a - b).norm(), 1e-9 * a.norm());
}

TEST(Resolvent, SampleConditionAtLeastOne) {
  const ResolventSample s = resolvent_sample(Pencil(kI2, Matrix::Zero(2, 2)), 2.0);
  EXPECT_NEAR(s.norm, 0.5, 1e-15);
  EXPECT_GE(s.condition, 1.0);
}

TEST(Regularity, InvertibleE) {
  const RegularityResult r = is_regular(Pencil(kI2, Matrix::Zero(2, 2)));
  EXPECT_TRUE(r.regular);
  EXPECT_NE(r.witness, Complex(0.0));
}

TEST(Regularity, DeterminantMinusLambda) {
  EXPECT_TRUE(is_regular(Pencil(m2(1, 0, 0, 0), m2(0, 0, 0, 1))).regular);
}

TEST(Regularity, IdenticallyZeroDeterminant) {
  const Pencil p(m2(1, 0, 0, 0), m2(1, 0, 0, 0));
  EXPECT_FALSE(is_regular(p).regular);
  try {
    require_regular(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotRegular);
    EXPECT_EQ(to_string(e.code()), "NOT_REGULAR");
  }
}

TEST(Regularity, SeedIsReproducible) {
  Rng rng(3);
  const Pencil p = random_singular_pencil(rng, 4, 2);
  EXPECT_EQ(is_regular(p, 99).witness, is_regular(p, 99).witness);
}

TEST(OperatorNorm, Examples) {
  EXPECT_NEAR(operator_norm(kI2), 1.0, 1e-15);
  EXPECT_NEAR(operator_norm(m2(3, 0, 0, 1)), 3.0, 1e-15);
  EXPECT_NEAR(operator_norm(m2(0, 2, 0, 0)), 2.0, 1e-15);
}

TEST(OperatorNorm, WeightedScaling) {
  // ‖W_out^{1/2} M W_in^{-1/2}‖ with W = 4I on both sides leaves ‖M‖ unchanged
  const Weight w(4.0 * kI2);
  EXPECT_NEAR(operator_norm(m2(3, 0, 0, 1), w, w), 3.0, 1e-14);
  const Weight in(4.0 * kI2);
  EXPECT_NEAR(operator_norm(m2(3, 0, 0, 1), in, Weight{}), 1.5, 1e-14);
}

TEST(OperatorNorm, GeneralWeightMatchesDefinition) {
  Rng rng(5);
  const Matrix l = random_matrix(rng, 3, 3);
  const Matrix w = l * l.adjoint() + Matrix::Identity(3, 3);
  const Matrix m = random_matrix(rng, 3, 3);
  const Weight wt(w);
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  const Matrix sq = es.operatorSqrt();
  const Matrix isq = es.operatorInverseSqrt();
  EXPECT_NEAR(operator_norm(m, wt, wt), linalg::largest_singular_value(sq * m * isq), 1e-12);
  Vector v = random_vector(rng, 3);
  EXPECT_NEAR(wt.vector_norm(v), (sq * v).norm(), 1e-12);
}

TEST(OperatorNorm, IsANorm) {
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_matrix(rng, 4, 3), b = random_matrix(rng, 4, 3);
    const Complex s(uniform(rng, -3, 3), uniform(rng, -3, 3));
    EXPECT_NEAR(operator_norm(s * a), std::abs(s) * operator_norm(a), 1e-12 * (1 + operator_norm(s * a)));
    EXPECT_LE(operator_norm(a + b), operator_norm(a) + operator_norm(b) + 1e-12);
  }
}

TEST(Weight, RejectsNonHermitianAndIndefinite) {
  EXPECT_THROW(Weight(m2(1, 1, 0, 1)), Error);
  EXPECT_THROW(Weight(m2(1, 0, 0, -1)), Error);
  EXPECT_THROW(Weight(m2(0, 0, 0, 0)), Error);
  try {
    Weight(m2(1, 0, 0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationFailed);
  }
}

TEST(Pencil, ShapeMismatch) {
  try {
    Pencil(Matrix::Zero(2, 2), Matrix::Zero(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  EXPECT_THROW(Pencil(kI2, kI2, Matrix::Identity(3, 3)), Error);
}
