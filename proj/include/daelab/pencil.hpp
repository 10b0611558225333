#pragma once

// Matrix pencils (E, A), resolvent evaluation, regularity, weighted norms.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include <Eigen/LU>

#include "daelab/detail/extended_lu.hpp"
#include "daelab/linalg.hpp"
#include "daelab/types.hpp"

namespace daelab {

/// Arithmetic used to invert λE−A. `automatic` switches to the wide type for
/// pencils with at most kAutoExtendedMaxDim columns.
enum class Precision { standard, extended, automatic };

inline constexpr Index kAutoExtendedMaxDim = 32;

/// Tolerance on Hermitian symmetry of the inner-product weights.
inline constexpr double kWeightHermitianTol = 1e-12;

/// An inner-product weight W (Hermitian positive definite) with its square roots.
class Weight {
 public:
  Weight() = default;

  explicit Weight(Matrix w) : w_(std::move(w)), identity_(false) {
    if (w_.rows() != w_.cols())
      throw Error(ErrorCode::DimensionMismatch, "weight must be square, got " + detail::shape_str(w_));
    if (!linalg::is_hermitian(w_, kWeightHermitianTol))
      throw Error(ErrorCode::ValidationFailed, "weight is not Hermitian within 1e-12");
    if (w_.rows() > 0 && w_.isApprox(w_(0, 0) * Matrix::Identity(w_.rows(), w_.cols()), 0.0)) {
      // c·I: keep the scalar and skip the eigen-decompositions
      if (!(w_(0, 0).real() > 0.0)) throw Error(ErrorCode::ValidationFailed, "weight is not positive definite");
      scalar_ = std::sqrt(w_(0, 0).real());
      return;
    }
    if (w_.rows() > 0 && linalg::min_hermitian_eigenvalue(w_) <= 0.0)
      throw Error(ErrorCode::ValidationFailed, "weight is not positive definite");
    sqrt_ = linalg::hermitian_sqrt(w_);
    inv_sqrt_ = linalg::hermitian_sqrt(w_, true);
  }

  static Weight identity() { return {}; }

  bool is_identity() const noexcept { return identity_; }
  Index dim() const noexcept { return w_.rows(); }
  const Matrix& matrix() const noexcept { return w_; }

  Matrix left_sqrt(const Matrix& m) const {
    if (identity_) return m;
    return scalar_ > 0.0 ? Matrix(scalar_ * m) : Matrix(sqrt_ * m);
  }
  Matrix right_inv_sqrt(const Matrix& m) const {
    if (identity_) return m;
    return scalar_ > 0.0 ? Matrix(m / scalar_) : Matrix(m * inv_sqrt_);
  }

  double vector_norm(const Vector& v) const {
    if (identity_) return v.norm();
    if (scalar_ > 0.0) return scalar_ * v.norm();
    return std::sqrt(std::max(0.0, (v.adjoint() * w_ * v)(0).real()));
  }

 private:
  Matrix w_;
  double scalar_ = 0.0;  // √c when the weight is c·I
  Matrix sqrt_;
  Matrix inv_sqrt_;
  bool identity_ = true;
};

/// Largest singular value of W_out^{1/2} M W_in^{-1/2}.
inline double operator_norm(const Matrix& m, const Weight& in = {}, const Weight& out = {}) {
  detail::require_shape(in.is_identity() || in.dim() == m.cols(),
                        "input weight does not match matrix columns");
  detail::require_shape(out.is_identity() || out.dim() == m.rows(),
                        "output weight does not match matrix rows");
  return linalg::largest_singular_value(out.left_sqrt(in.right_inv_sqrt(m)));
}

/// The pair (E, A) with optional state (X) and codomain (Z) inner-product weights.
/// Immutable after construction.
class Pencil {
 public:
  Pencil(Matrix e, Matrix a, std::optional<Matrix> state_weight = std::nullopt,
         std::optional<Matrix> codomain_weight = std::nullopt)
      : e_(std::move(e)), a_(std::move(a)) {
    detail::require_shape(e_.rows() == a_.rows() && e_.cols() == a_.cols(),
                          "E is " + detail::shape_str(e_) + " but A is " + detail::shape_str(a_));
    if (state_weight) {
      detail::require_shape(state_weight->rows() == e_.cols(), "state weight must be n x n");
      x_weight_ = Weight(std::move(*state_weight));
    }
    if (codomain_weight) {
      detail::require_shape(codomain_weight->rows() == e_.rows(), "codomain weight must be m x m");
      z_weight_ = Weight(std::move(*codomain_weight));
    }
  }

  const Matrix& E() const noexcept { return e_; }
  const Matrix& A() const noexcept { return a_; }
  Index rows() const noexcept { return e_.rows(); }
  Index cols() const noexcept { return e_.cols(); }
  bool is_square() const noexcept { return e_.rows() == e_.cols(); }

  const Weight& state_weight() const noexcept { return x_weight_; }
  const Weight& codomain_weight() const noexcept { return z_weight_; }

  /// Same weights, different matrices.
  Pencil with_matrices(Matrix e, Matrix a) const {
    Pencil p(std::move(e), std::move(a));
    p.x_weight_ = x_weight_;
    p.z_weight_ = z_weight_;
    return p;
  }

 private:
  Matrix e_;
  Matrix a_;
  Weight x_weight_;
  Weight z_weight_;
};

struct ResolventSample {
  Complex lambda;
  double norm = 0.0;       // ‖(λE−A)⁻¹‖ in L(Z, X)
  double condition = 1.0;  // ‖λE−A‖ ‖(λE−A)⁻¹‖ in the same weighted norms
};

namespace detail {

inline bool use_wide(Precision prec, Index n) {
  return prec == Precision::extended || (prec == Precision::automatic && n <= kAutoExtendedMaxDim);
}

inline double singular_threshold(bool wide) {
  return wide ? kSingularConditionThreshold * (kMachineEps / kWideEps) : kSingularConditionThreshold;
}

inline void require_square(const Pencil& p) {
  require_shape(p.is_square(), "resolvent requires a square pencil, got " + shape_str(p.E()) +
                                   " (rectangular pencils have an empty resolvent set)");
}

inline double one_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace detail

/// (λE−A)⁻¹. Throws NotInResolventSetError when the 1-norm condition of λE−A
/// exceeds 1e12 (scaled by the unit roundoff ratio in extended precision).
inline Matrix resolvent(const Pencil& p, Complex lambda, Precision prec = Precision::standard) {
  detail::require_square(p);
  const Index n = p.cols();
  if (n == 0) return Matrix(0, 0);
  const bool wide = detail::use_wide(prec, n);
  Matrix inv;
  double cond = 0.0;
  if (wide) {
    auto res = detail::wide_shifted_inverse(p.E(), p.A(), lambda);
    inv = std::move(res.inverse);
    cond = res.condition_1norm;
  } else {
    const Matrix m = lambda * p.E() - p.A();
    Eigen::PartialPivLU<Matrix> lu(m);
    inv = lu.inverse();
    cond = inv.allFinite() ? detail::one_norm(m) * detail::one_norm(inv)
                           : std::numeric_limits<double>::infinity();
    if (!std::isfinite(cond) || detail::one_norm(m) == 0.0) cond = std::numeric_limits<double>::infinity();
  }
  if (!(cond <= detail::singular_threshold(wide)))
    throw NotInResolventSetError(lambda, cond,
                                 "lambda = (" + std::to_string(lambda.real()) + ", " +
                                     std::to_string(lambda.imag()) + ") is not in the resolvent set");
  return inv;
}

/// Resolvent norm in L(Z, X) together with the weighted condition number.
inline ResolventSample resolvent_sample(const Pencil& p, Complex lambda, Precision prec = Precision::standard) {
  detail::require_square(p);
  if (p.cols() > 0 && !detail::use_wide(prec, p.cols())) {
    // One SVD of the weighted λE−A gives ‖R‖ = 1/σ_min and the condition.
    const Matrix mw = p.codomain_weight().left_sqrt(p.state_weight().right_inv_sqrt(lambda * p.E() - p.A()));
    const RealVector sv = Eigen::BDCSVD<Matrix>(mw).singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!(cond <= detail::singular_threshold(false)))
      throw NotInResolventSetError(lambda, cond,
                                   "lambda = (" + std::to_string(lambda.real()) + ", " +
                                       std::to_string(lambda.imag()) + ") is not in the resolvent set");
    return {lambda, 1.0 / smin, std::max(1.0, cond)};
  }
  const Matrix r = resolvent(p, lambda, prec);
  const double rn = operator_norm(r, p.codomain_weight(), p.state_weight());
  const double mn = operator_norm(lambda * p.E() - p.A(), p.state_weight(), p.codomain_weight());
  return {lambda, rn, std::max(1.0, rn * mn)};
}

struct RegularityResult {
  bool regular = false;
  Complex witness;
  double witness_condition = std::numeric_limits<double>::infinity();
};

/// det(λE−A) ≢ 0 decided on up to n+1 random points of the circle
/// |λ| = 1+‖E‖+‖A‖. One well-conditioned sample proves regularity; a nonzero
/// determinant polynomial has at most n roots, so a "singular" verdict needs
/// every sample to land within numerical distance of a root.
inline RegularityResult is_regular(const Pencil& p, std::uint64_t seed = 0x5eedULL) {
  detail::require_shape(p.is_square(), "regularity requires a square pencil, got " + detail::shape_str(p.E()));
  const Index n = p.cols();
  RegularityResult out;
  if (n == 0) {
    out.regular = true;
    out.witness = 1.0;
    out.witness_condition = 1.0;
    return out;
  }
  const double radius = 1.0 + linalg::largest_singular_value(p.E()) + linalg::largest_singular_value(p.A());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (Index k = 0; k <= n; ++k) {
    const Complex lambda = std::polar(radius, angle(rng));
    Eigen::PartialPivLU<Matrix> lu(lambda * p.E() - p.A());
    // rcond() reports 1 when a pivot is exactly zero, so the pivot ratio backs it up
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double rc = lu.rcond();
    double cond = rc > 0.0 && std::isfinite(rc) ? 1.0 / rc : std::numeric_limits<double>::infinity();
    cond = std::max(cond, pivots.minCoeff() > 0.0 ? pivots.maxCoeff() / pivots.minCoeff()
                                                  : std::numeric_limits<double>::infinity());
    if (cond < out.witness_condition) {
      out.witness_condition = cond;
      out.witness = lambda;
    }
    if (out.witness_condition < kSingularConditionThreshold) break;
  }
  out.regular = out.witness_condition < kSingularConditionThreshold;
  return out;
}

inline void require_regular(const Pencil& p) {
  if (!p.is_square())
    throw Error(ErrorCode::NotRegular, "rectangular pencil " + detail::shape_str(p.E()) + " is not regular");
  if (!is_regular(p).regular) throw Error(ErrorCode::NotRegular, "det(lambda E - A) vanishes identically");
}

}  // namespace daelab
