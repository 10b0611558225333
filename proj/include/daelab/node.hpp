#pragma once

// E-system nodes S = [A&B; C&D] in finite dimensions. The domain of S is all
// of X×U here, so A&B = [A B] and C&D = [C D] split without extrapolation
// spaces; the closedness axioms of an operator node hold trivially.

#include <utility>

#include "daelab/linalg.hpp"
#include "daelab/pencil.hpp"

namespace daelab {

class SystemNode {
 public:
  SystemNode(Matrix e, Matrix a, Matrix b, Matrix c, Matrix d)
      : pencil_(std::move(e), std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    const Index m = pencil_.rows();
    const Index n = pencil_.cols();
    detail::require_shape(b_.rows() == m, "B must have as many rows as E");
    detail::require_shape(c_.cols() == n, "C must have as many columns as E");
    detail::require_shape(d_.rows() == c_.rows() && d_.cols() == b_.cols(), "D must be outputs x inputs");
    if (pencil_.is_square()) require_regular(pencil_);
  }

  const Pencil& pencil() const noexcept { return pencil_; }
  const Matrix& E() const noexcept { return pencil_.E(); }
  const Matrix& A() const noexcept { return pencil_.A(); }
  const Matrix& B() const noexcept { return b_; }
  const Matrix& C() const noexcept { return c_; }
  const Matrix& D() const noexcept { return d_; }

  Index state_dim() const noexcept { return pencil_.cols(); }
  Index codomain_dim() const noexcept { return pencil_.rows(); }
  Index input_dim() const noexcept { return b_.cols(); }
  Index output_dim() const noexcept { return c_.rows(); }

  /// [A B] (x; u)
  Vector dynamics(const Vector& x, const Vector& u) const { return A() * x + b_ * u; }
  /// [C D] (x; u)
  Vector output(const Vector& x, const Vector& u) const { return c_ * x + d_ * u; }

 private:
  Pencil pencil_;
  Matrix b_;
  Matrix c_;
  Matrix d_;
};

struct TransferEval {
  Complex lambda;
  Matrix G;
};

/// G(λ) = C(λE−A)⁻¹B + D. Improper (growing) G is allowed.
inline TransferEval transfer(const SystemNode& n, Complex lambda) {
  return {lambda, n.C() * (resolvent(n.pencil(), lambda) * n.B()) + n.D()};
}

/// ‖G(ρ) − G(λ) − (λ−ρ) C(ρE−A)⁻¹E(λE−A)⁻¹B‖.
inline double transfer_identity_residual(const SystemNode& n, Complex lambda, Complex rho) {
  const Matrix r_l = resolvent(n.pencil(), lambda);
  const Matrix r_r = resolvent(n.pencil(), rho);
  const Matrix g_l = n.C() * r_l * n.B() + n.D();
  const Matrix g_r = n.C() * r_r * n.B() + n.D();
  const Matrix rhs = (lambda - rho) * (n.C() * r_r * n.E() * r_l * n.B());
  return linalg::largest_singular_value(g_r - g_l - rhs);
}

/// Scale used by the transfer identity contract: 1 + ‖G(λ)‖ + ‖G(ρ)‖.
inline double transfer_identity_scale(const SystemNode& n, Complex lambda, Complex rho) {
  return 1.0 + linalg::largest_singular_value(transfer(n, lambda).G) +
         linalg::largest_singular_value(transfer(n, rho).G);
}

enum class Direction { forward, inverse };

/// F_λ = [[I, −(λE−A)⁻¹B], [0, I]] and its inverse (sign-flipped block).
inline Matrix f_lambda(const SystemNode& n, Complex lambda, Direction dir) {
  const Index ns = n.state_dim();
  const Index nu = n.input_dim();
  Matrix f = Matrix::Identity(ns + nu, ns + nu);
  const Matrix rb = resolvent(n.pencil(), lambda) * n.B();
  f.topRightCorner(ns, nu) = dir == Direction::forward ? Matrix(-rb) : rb;
  return f;
}

/// ‖(Cx + Du) − (C[x − (λE−A)⁻¹Bu] + G(λ)u)‖.
inline double output_split_residual(const SystemNode& n, const Vector& x, const Vector& u, Complex lambda) {
  detail::require_shape(x.size() == n.state_dim() && u.size() == n.input_dim(), "x/u dimension mismatch");
  const Matrix r = resolvent(n.pencil(), lambda);
  const Vector ru = r * (n.B() * u);
  const Matrix g = n.C() * r * n.B() + n.D();
  return (n.output(x, u) - (n.C() * (x - ru) + g * u)).norm();
}

/// Adjoint node: [A&B]ᵈ = [Aᴴ Cᴴ], [C&D]ᵈ(z, y) = Bᴴ(z − (λE−A)⁻ᴴCᴴy) + G(λ)ᴴy.
/// The feedthrough is materialized by evaluating [C&D]ᵈ on (0, eᵢ).
inline SystemNode adjoint_node(const SystemNode& n, Complex lambda) {
  const Matrix r = resolvent(n.pencil(), lambda);
  const Matrix g = n.C() * r * n.B() + n.D();
  const Matrix rh_ch = r.adjoint() * n.C().adjoint();
  const Index ny = n.output_dim();
  Matrix d_adj(n.input_dim(), ny);
  for (Index i = 0; i < ny; ++i) {
    const Vector y = Vector::Unit(ny, i);
    d_adj.col(i) = -(n.B().adjoint() * (rh_ch * y)) + g.adjoint() * y;
  }
  return {n.E().adjoint(), n.A().adjoint(), n.C().adjoint(), n.B().adjoint(), d_adj};
}

/// For x = (λE−A)⁻¹Bu: ‖(I − P_{ran E})(Ax + Bu)‖ / max(1, ‖Ax + Bu‖).
inline double domain_solvability_residual(const SystemNode& n, const Vector& u, Complex lambda) {
  const Vector x = resolvent(n.pencil(), lambda) * (n.B() * u);
  const Vector v = n.dynamics(x, u);
  const Matrix ran_e = linalg::range_basis(n.E());
  const Vector off = v - ran_e * (ran_e.adjoint() * v);
  return off.norm() / std::max(1.0, v.norm());
}

}  // namespace daelab
