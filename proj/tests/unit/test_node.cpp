#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace daelab;
using namespace daelab::testing;

namespace {

Matrix s(Complex v) {
  Matrix m(1, 1);
  m << v;
  return m;
}

SystemNode scalar_integrator() { return {s(1), s(0), s(1), s(1), s(0)}; }

SystemNode nilpotent_node() {
  Matrix e = Matrix::Zero(2, 2);
  e(0, 1) = 1;
  Matrix b = Matrix::Zero(2, 1), c = Matrix::Zero(1, 2);
  b(1, 0) = 1;
  c(0, 0) = 1;
  return {e, Matrix::Identity(2, 2), b, c, Matrix::Zero(1, 1)};
}

double gap(const Matrix& a, const Matrix& b) { return linalg::largest_singular_value(a - b); }

}  // namespace

TEST(Transfer, ScalarIntegrator) { EXPECT_NEAR(std::abs(transfer(scalar_integrator(), 2.0).G(0, 0) - 0.5), 0.0, 1e-15); }

TEST(Transfer, ImproperIndexTwo) {
  for (Complex l : {Complex(2.0), Complex(1.0, 3.0), Complex(-7.0, 0.5)})
    EXPECT_NEAR(std::abs(transfer(nilpotent_node(), l).G(0, 0) + l), 0.0, 1e-12);
}

TEST(Transfer, ZeroCGivesFeedthrough) {
  Rng rng(1);
  const SystemNode n0 = random_node(rng, 4, 2, 3, 2);
  const SystemNode n(n0.E(), n0.A(), n0.B(), Matrix::Zero(3, 4), n0.D());
  EXPECT_LT(gap(transfer(n, random_resolvent_point(rng, n.pencil())).G, n.D()), 1e-15);
}

TEST(Transfer, OutsideResolventSet) {
  EXPECT_THROW(transfer(SystemNode(s(1), s(2), s(1), s(1), s(0)), 2.0), NotInResolventSetError);
}

TEST(TransferIdentity, Examples) {
  const SystemNode n = scalar_integrator();
  EXPECT_LT(transfer_identity_residual(n, 2.0, 2.0), 1e-15);
  EXPECT_LT(transfer_identity_residual(n, 2.0, 3.0), 1e-15);
  Rng rng(2);
  const SystemNode r = random_node(rng, 4, 2, 2, 3);
  for (int k = 0; k < 20; ++k) {
    const Complex l = random_resolvent_point(rng, r.pencil()), rho = random_resolvent_point(rng, r.pencil());
    EXPECT_LE(transfer_identity_residual(r, l, rho), 1e-9 * transfer_identity_scale(r, l, rho));
  }
}

TEST(FLambda, Examples) {
  Rng rng(3);
  const SystemNode n0 = random_node(rng, 3, 2, 1, 2);
  const SystemNode nb(n0.E(), n0.A(), Matrix::Zero(3, 2), n0.C(), Matrix::Zero(1, 2));
  const Complex l = random_resolvent_point(rng, n0.pencil());
  EXPECT_LT(gap(f_lambda(nb, l, Direction::forward), Matrix::Identity(5, 5)), 1e-15);

  Matrix expect(2, 2);
  expect << 1, -1, 0, 1;
  EXPECT_LT(gap(f_lambda(scalar_integrator(), 1.0, Direction::forward), expect), 1e-15);

  const Matrix prod = f_lambda(n0, l, Direction::forward) * f_lambda(n0, l, Direction::inverse);
  EXPECT_LT(gap(prod, Matrix::Identity(5, 5)), 1e-12);
}

TEST(OutputSplit, Examples) {
  Rng rng(4);
  const SystemNode n = random_node(rng, 4, 2, 2, 2);
  const Vector x = random_vector(rng, 4);
  EXPECT_EQ(output_split_residual(n, x, Vector::Zero(2), 3.0), 0.0);
  EXPECT_LT(output_split_residual(n, x, random_vector(rng, 2), 3.0), 1e-10);
  Vector one(1);
  one << 1.0;
  EXPECT_LT(output_split_residual(scalar_integrator(), one, one, 2.0), 1e-15);
}

TEST(Adjoint, SelfAdjointNodeAtRealPoints) {
  Rng rng(5);
  const Matrix a0 = random_matrix(rng, 3, 3, false);
  const Matrix b = random_matrix(rng, 3, 2, false);
  const Matrix d0 = random_matrix(rng, 2, 2, false);
  const SystemNode n(Matrix::Identity(3, 3), a0 + a0.adjoint(), b, b.adjoint(), d0 + d0.adjoint());
  const SystemNode adj = adjoint_node(n, Complex(0.0, 1.0) + 40.0);
  for (double mu : {30.0, 45.0, 60.0}) EXPECT_LT(gap(transfer(adj, mu).G, transfer(n, mu).G), 1e-12);
}

TEST(Adjoint, ScalarIntegrator) {
  const SystemNode adj = adjoint_node(scalar_integrator(), Complex(2.0, 1.0));
  for (Complex mu : {Complex(1.0, 1.0), Complex(3.0, -2.0)})
    EXPECT_NEAR(std::abs(transfer(adj, mu).G(0, 0) - 1.0 / mu), 0.0, 1e-14);
}

TEST(Adjoint, TransferIsConjugateTranspose) {
  Rng rng(6);
  const SystemNode n = random_node(rng, 3, 2, 2, 2);
  const SystemNode adj = adjoint_node(n, random_resolvent_point(rng, n.pencil()));
  for (int k = 0; k < 10; ++k) {
    const Complex mu = random_resolvent_point(rng, n.pencil());
    EXPECT_LT(gap(transfer(adj, std::conj(mu)).G, transfer(n, mu).G.adjoint()), 1e-9);
  }
}

TEST(Adjoint, DoubleAdjointAndConstructionPointIndependence) {
  Rng rng(7);
  const SystemNode n = random_node(rng, 4, 2, 3, 2);
  const Complex l1 = random_resolvent_point(rng, n.pencil()), l2 = random_resolvent_point(rng, n.pencil());
  const SystemNode a1 = adjoint_node(n, l1), a2 = adjoint_node(n, l2);
  const SystemNode aa = adjoint_node(a1, std::conj(l2));
  for (int k = 0; k < 10; ++k) {
    const Complex mu = random_resolvent_point(rng, n.pencil());
    EXPECT_LT(gap(transfer(a1, mu).G, transfer(a2, mu).G), 1e-9);
    EXPECT_LT(gap(transfer(aa, mu).G, transfer(n, mu).G), 1e-9);
  }
}

TEST(Transfer, CauchyRiemann) {
  Rng rng(8);
  const SystemNode n = random_node(rng, 4, 1, 1, 2);
  const double d = 1e-5;
  for (int k = 0; k < 10; ++k) {
    const Complex l = random_resolvent_point(rng, n.pencil());
    const Matrix dx = (transfer(n, l + d).G - transfer(n, l - d).G) / (2 * d);
    const Matrix dy = (transfer(n, l + Complex(0, d)).G - transfer(n, l - Complex(0, d)).G) / Complex(0, 2 * d);
    EXPECT_LT(gap(dx, dy), 1e-6 * (1 + dx.norm()));
  }
}

TEST(Node, DomainSolvability) {
  Rng rng(9);
  const SystemNode n = random_node(rng, 5, 2, 1, 3);
  for (int k = 0; k < 5; ++k)
    EXPECT_LT(domain_solvability_residual(n, random_vector(rng, 2), random_resolvent_point(rng, n.pencil())), 1e-9);
}

TEST(Node, ConstructionChecks) {
  try {
    SystemNode(s(1), s(0), Matrix::Zero(2, 1), s(1), s(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  Matrix e = Matrix::Zero(2, 2);
  e(0, 0) = 1;
  try {
    SystemNode(e, e, Matrix::Zero(2, 1), Matrix::Zero(1, 2), s(0));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NotRegular);
  }
}
