#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace daelab;
using namespace daelab::testing;

namespace {

Matrix diag10() {
  Matrix e = Matrix::Zero(2, 2);
  e(0, 0) = 1;
  return e;
}

Vector v2(Complex a, Complex b) {
  Vector v(2);
  v << a, b;
  return v;
}

// f ≡ (0, 1): jet (0, 1), 0, 0, …
InputJet const_jet(Index p) {
  InputJet j;
  j.values.push_back(v2(0, 1));
  for (Index k = 1; k < p; ++k) j.values.push_back(Vector::Zero(2));
  return j;
}

}  // namespace

TEST(SolveChain, InvertibleEAlwaysFeasible) {
  Rng rng(1);
  const Matrix a = random_matrix(rng, 3, 3);
  InputJet jet;
  for (int k = 0; k < 3; ++k) jet.values.push_back(random_vector(rng, 3));
  const ChainCertificate c = solve_chain(Matrix::Identity(3, 3), a, random_vector(rng, 3), jet, 3);
  EXPECT_TRUE(c.feasible);
  EXPECT_EQ(c.chain.size(), 4u);
  EXPECT_LT((c.chain[1] - (a * c.chain[0] + jet.values[0])).norm(), 1e-12);
}

TEST(SolveChain, SemiExplicitConsistent) {
  const ChainCertificate c = solve_chain(diag10(), -Matrix::Identity(2, 2), v2(0, 1), const_jet(2), 2);
  ASSERT_TRUE(c.feasible);
  EXPECT_LT(c.chain[1].norm(), 1e-12);
  EXPECT_FALSE(c.first_failing_level.has_value());
}

TEST(SolveChain, SemiExplicitInconsistent) {
  const ChainCertificate c = solve_chain(diag10(), -Matrix::Identity(2, 2), v2(0, 0), const_jet(2), 2);
  EXPECT_FALSE(c.feasible);
  ASSERT_TRUE(c.first_failing_level.has_value());
  EXPECT_EQ(*c.first_failing_level, 0);
  EXPECT_NEAR(c.residuals[0], 1.0, 1e-12);
}

TEST(SolveChain, JointSolveAcceptsRampInput) {
  // f = (0, t): x₂ = t forces x₁ of the chain to carry x₂' = 1 at level 1
  InputJet jet;
  jet.values = {v2(0, 0), v2(0, 1)};
  EXPECT_TRUE(solve_chain(diag10(), -Matrix::Identity(2, 2), v2(3, 0), jet, 2).feasible);
}

TEST(SolveChain, ArgumentChecks) {
  EXPECT_THROW(solve_chain(diag10(), -Matrix::Identity(2, 2), v2(0, 1), const_jet(1), 2), Error);
  EXPECT_THROW(solve_chain(diag10(), -Matrix::Identity(2, 2), Vector::Zero(3), const_jet(2), 2), Error);
}

TEST(Membership, Examples) {
  Rng rng(2);
  InputJet jet;
  for (int k = 0; k < 3; ++k) jet.values.push_back(random_vector(rng, 3));
  EXPECT_TRUE(consistent_membership(Matrix::Identity(3, 3), random_matrix(rng, 3, 3), random_vector(rng, 3), jet)
                  .consistent);
  const Membership yes = consistent_membership(diag10(), -Matrix::Identity(2, 2), v2(0, 1), const_jet(2));
  EXPECT_TRUE(yes.consistent);
  EXPECT_EQ(yes.chain_length, 2);
  EXPECT_FALSE(consistent_membership(diag10(), -Matrix::Identity(2, 2), v2(0, 0), const_jet(2)).consistent);
  EXPECT_THROW(consistent_membership(diag10(), diag10(), v2(0, 0), const_jet(2)), Error);
}

TEST(Membership, ShiftInvariance) {
  // y = e^{−ωt}x solves E y' = (A − ωE)y + e^{−ωt}f; the jets transform by Leibniz.
  Rng rng(3);
  const double omega = 1.7;
  for (int t = 0; t < 10; ++t) {
    const auto c = weierstrass_pencil(rng, 4, 1 + t % 2);
    const Matrix e = c.pencil.E(), a = c.pencil.A();
    const Index p = default_chain_length(c.pencil);
    InputJet f;
    for (Index k = 0; k < p; ++k) f.values.push_back(random_vector(rng, 4));
    InputJet g;
    for (Index j = 0; j < p; ++j) {
      Vector acc = Vector::Zero(4);
      for (Index i = 0; i <= j; ++i) {
        double binom = 1.0;
        for (Index q = 0; q < i; ++q) binom = binom * static_cast<double>(j - q) / static_cast<double>(q + 1);
        acc += binom * std::pow(-omega, static_cast<double>(j - i)) * f.values[static_cast<std::size_t>(i)];
      }
      g.values.push_back(acc);
    }
    const Vector good = project_consistent(e, a, random_vector(rng, 4), f, p);
    const Vector bad = good + linalg::kernel_basis(e).col(0);
    for (const Vector& x0 : {good, bad})
      EXPECT_EQ(solve_chain(e, a, x0, f, p).feasible, solve_chain(e, a - omega * e, x0, g, p).feasible);
  }
}

TEST(ProjectConsistent, ProducesFeasibleIdempotentPoint) {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto c = weierstrass_pencil(rng, 5, 1 + t % 3);
    const Index p = default_chain_length(c.pencil);
    InputJet jet;
    for (Index k = 0; k < p; ++k) jet.values.push_back(random_vector(rng, 5));
    const Vector x = project_consistent(c.pencil.E(), c.pencil.A(), random_vector(rng, 5), jet, p);
    EXPECT_TRUE(solve_chain(c.pencil.E(), c.pencil.A(), x, jet, p).feasible);
    const Vector again = project_consistent(c.pencil.E(), c.pencil.A(), x, jet, p);
    EXPECT_LT((again - x).norm(), 1e-8 * (1 + x.norm()));
  }
}

TEST(ProjectConsistent, NoConsistentValue) {
  InputJet jet;
  jet.values = {v2(1, 0)};
  try {
    project_consistent(Matrix::Zero(2, 2), Matrix::Zero(2, 2), v2(0, 0), jet, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentInitialValue);
  }
}

TEST(NecessaryProjection, InvertibleEIsFullSpace) {
  Rng rng(5);
  std::vector<std::pair<Vector, Vector>> samples;
  for (int k = 0; k < 5; ++k) samples.emplace_back(random_vector(rng, 3), random_vector(rng, 3));
  EXPECT_LT(necessary_projection_check(Matrix::Identity(3, 3), random_matrix(rng, 3, 3), samples), 1e-12);
}

TEST(NecessaryProjection, SemiExplicitTrajectory) {
  const SystemNode node(diag10(), -Matrix::Identity(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                        Matrix::Zero(2, 2));
  const InputSignal u = InputSignal::polynomial({v2(1, 1), v2(0.5, -2), v2(0, 0.3)});
  const Vector x0 = project_consistent(node.E(), node.A(), v2(1, 0), u.jet(2), 2);
  IntegrateOptions opt;
  opt.scheme = Scheme::implicit_euler;
  const Trajectory traj = integrate(node, x0, u, opt);
  std::vector<std::pair<Vector, Vector>> samples;
  for (std::size_t k = 0; k < traj.size(); ++k) samples.emplace_back(traj.states[k], traj.inputs[k]);
  EXPECT_LT(necessary_projection_check(node.E(), node.A(), samples), 1e-6);
}

TEST(NecessaryProjection, CorruptedSampleDistance) {
  // limit: −x₂ + f₂ = 0, so the distance is |x₂ − f₂|/√2
  const Vector x = v2(0.3, 2.0), f = v2(-1.0, 0.5);
  const double d = necessary_projection_check(diag10(), -Matrix::Identity(2, 2), {{x, f}});
  EXPECT_NEAR(d, std::abs(2.0 - 0.5) / std::sqrt(2.0), 1e-12);
}
