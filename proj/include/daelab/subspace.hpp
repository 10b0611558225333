#pragma once

// Subspace arithmetic on orthonormal bases and the (augmented) Wong sequences.
//
// In finite dimensions the closures of the Wong spaces are the spaces
// themselves, so "closure" checks below are plain membership checks.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "daelab/linalg.hpp"
#include "daelab/pencil.hpp"
#include "daelab/types.hpp"

namespace daelab {

/// Orthonormality tolerance on stored bases.
inline constexpr double kOrthonormalTol = 1e-10;
/// Principal-angle tolerance for subspace equality and nestedness.
inline constexpr double kSubspaceAngleTol = 1e-8;

class Subspace {
 public:
  Subspace() = default;

  /// `basis` must have orthonormal columns.
  Subspace(Matrix basis, Index ambient, double tol = 0.0)
      : basis_(std::move(basis)), ambient_(ambient), tol_(tol) {
    if (basis_.cols() == 0) basis_.resize(ambient_, 0);
    detail::require_shape(basis_.rows() == ambient_, "basis rows must equal the ambient dimension");
    detail::require_shape(basis_.cols() <= ambient_, "more basis vectors than ambient dimension");
    if (basis_.cols() > 0) {
      const double err = (basis_.adjoint() * basis_ - Matrix::Identity(basis_.cols(), basis_.cols())).norm();
      if (err > kOrthonormalTol) throw Error(ErrorCode::ValidationFailed, "subspace basis is not orthonormal");
    }
  }

  static Subspace full(Index d) { return {Matrix::Identity(d, d), d}; }
  static Subspace zero(Index d) { return {Matrix(d, 0), d}; }

  /// Orthonormalized span of the columns of `vectors`. Singular values at or
  /// below tol.threshold(rows, cols, scale) are dropped; `scale` defaults to
  /// the largest singular value of `vectors`.
  static Subspace span(const Matrix& vectors, const RankTolerance& tol = {}, double scale = -1.0) {
    const Index d = vectors.rows();
    if (vectors.cols() == 0) return zero(d);
    Eigen::BDCSVD<Matrix> svd(vectors, Eigen::ComputeFullU);
    const RealVector& sv = svd.singularValues();
    const double s = scale >= 0.0 ? scale : (sv.size() ? sv(0) : 0.0);
    const double thr = tol.threshold(vectors.rows(), vectors.cols(), s);
    Index r = 0;
    while (r < sv.size() && sv(r) > thr) ++r;
    return {svd.matrixU().leftCols(r), d, thr};
  }

  const Matrix& basis() const noexcept { return basis_; }
  Index dim() const noexcept { return basis_.cols(); }
  Index ambient() const noexcept { return ambient_; }
  double tol() const noexcept { return tol_; }

  Matrix projector() const { return linalg::projector(basis_, ambient_); }

  /// ‖(I − P)v‖.
  double distance(const Vector& v) const {
    detail::require_shape(v.size() == ambient_, "vector dimension does not match subspace ambient");
    if (dim() == 0) return v.norm();
    return (v - basis_ * (basis_.adjoint() * v)).norm();
  }

  /// Residual of projecting the columns of `m` onto this subspace, (I − P)m.
  Matrix complement_part(const Matrix& m) const {
    if (dim() == 0) return m;
    return m - basis_ * (basis_.adjoint() * m);
  }

 private:
  Matrix basis_ = Matrix(0, 0);
  Index ambient_ = 0;
  double tol_ = 0.0;
};

/// M·S.
inline Subspace image(const Matrix& m, const Subspace& s, const RankTolerance& tol = {}) {
  detail::require_shape(m.cols() == s.ambient(), "image: matrix columns do not match subspace ambient");
  if (s.dim() == 0) return Subspace::zero(m.rows());
  return Subspace::span(m * s.basis(), tol, linalg::largest_singular_value(m));
}

/// {v : Mv ∈ S}, computed as ker((I − P_S)M). Rank is decided relative to ‖M‖.
inline Subspace preimage(const Matrix& m, const Subspace& s, const RankTolerance& tol = {}) {
  detail::require_shape(m.rows() == s.ambient(), "preimage: matrix rows do not match subspace ambient");
  const Index n = m.cols();
  if (s.dim() == s.ambient()) return Subspace::full(n);
  const Matrix k = s.complement_part(m);
  if (k.rows() == 0 || n == 0) return Subspace::full(n);
  Eigen::BDCSVD<Matrix> svd(k, Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double thr = tol.threshold(m.rows(), m.cols(), linalg::largest_singular_value(m));
  Index r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  return {svd.matrixV().rightCols(n - r), n, thr};
}

inline Subspace subspace_sum(const Subspace& a, const Subspace& b, const RankTolerance& tol = {}) {
  detail::require_shape(a.ambient() == b.ambient(), "sum: ambient dimensions differ");
  Matrix stacked(a.ambient(), a.dim() + b.dim());
  stacked << a.basis(), b.basis();
  return Subspace::span(stacked, tol, 1.0);
}

inline Subspace intersection(const Subspace& a, const Subspace& b, const RankTolerance& tol = {}) {
  detail::require_shape(a.ambient() == b.ambient(), "intersection: ambient dimensions differ");
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.ambient());
  // a ∩ b = a.basis · ker((I − P_b) a.basis)
  const Subspace coords = preimage(a.basis(), b, tol);
  return Subspace::span(a.basis() * coords.basis(), tol, 1.0);
}

/// Principal angles between two subspaces, ascending.
inline RealVector principal_angles(const Subspace& a, const Subspace& b) {
  detail::require_shape(a.ambient() == b.ambient(), "principal_angles: ambient dimensions differ");
  if (a.dim() == 0 || b.dim() == 0) return RealVector(0);
  Eigen::JacobiSVD<Matrix> svd(a.basis().adjoint() * b.basis());
  RealVector cosines = svd.singularValues();
  RealVector angles(cosines.size());
  for (Index i = 0; i < cosines.size(); ++i) angles(i) = std::acos(std::clamp(cosines(i), 0.0, 1.0));
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

/// Largest angle between a vector of `a` and the subspace `b`; 0 iff a ⊆ b.
inline double max_angle_into(const Subspace& a, const Subspace& b) {
  detail::require_shape(a.ambient() == b.ambient(), "max_angle_into: ambient dimensions differ");
  if (a.dim() == 0) return 0.0;
  const double s = linalg::largest_singular_value(b.complement_part(a.basis()));
  return std::asin(std::clamp(s, 0.0, 1.0));
}

inline bool same_subspace(const Subspace& a, const Subspace& b, double angle_tol = kSubspaceAngleTol) {
  return a.ambient() == b.ambient() && a.dim() == b.dim() && max_angle_into(a, b) < angle_tol &&
         max_angle_into(b, a) < angle_tol;
}

/// ‖(I − P_S)v‖ ≤ tol·max(1, ‖v‖).
inline bool contains(const Subspace& s, const Vector& v, double tol) {
  return s.distance(v) <= tol * std::max(1.0, v.norm());
}

struct WongChain {
  std::vector<Subspace> spaces;
  Index stabilized_at = 0;
  bool converged = false;

  const Subspace& limit() const { return spaces.at(static_cast<std::size_t>(stabilized_at)); }

  std::vector<Index> dims() const {
    std::vector<Index> d;
    d.reserve(spaces.size());
    for (const auto& s : spaces) d.push_back(s.dim());
    return d;
  }

  /// Largest angle by which some 𝒱ᵢ₊₁ leaves 𝒱ᵢ.
  double nestedness_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < spaces.size(); ++i)
      worst = std::max(worst, max_angle_into(spaces[i + 1], spaces[i]));
    return worst;
  }
};

/// Relative rank tolerance for chain iterations. Round-off compounds over the
/// steps, so the one-shot default max(m,n)·eps is too tight here.
inline constexpr double kChainRankTol = 1e-10;

struct WongOptions {
  RankTolerance rank{kChainRankTol};
  double angle_tol = kSubspaceAngleTol;
};

namespace detail {

/// Runs 𝒱ᵢ₊₁ = step(𝒱ᵢ) from `start` until two consecutive spaces agree. The
/// repeated space is kept, so spaces[stabilized_at] == spaces[stabilized_at+1].
template <typename Step>
WongChain iterate_chain(Subspace start, Step&& step, const WongOptions& opt) {
  WongChain chain;
  const Index ambient = start.ambient();
  chain.spaces.push_back(std::move(start));
  for (Index i = 0; i <= ambient + 1; ++i) {
    Subspace next = step(chain.spaces.back());
    const bool same = same_subspace(next, chain.spaces.back(), opt.angle_tol);
    chain.spaces.push_back(std::move(next));
    if (same) {
      chain.stabilized_at = i;
      chain.converged = true;
      return chain;
    }
  }
  chain.stabilized_at = static_cast<Index>(chain.spaces.size()) - 1;
  return chain;
}

}  // namespace detail

/// 𝒱₀ = Cⁿ, 𝒱ᵢ₊₁ = A⁻¹(E𝒱ᵢ). Its limit is the finite deflating subspace.
inline WongChain wong_sequence(const Pencil& p, const WongOptions& opt = {}) {
  require_regular(p);
  return detail::iterate_chain(
      Subspace::full(p.cols()),
      [&](const Subspace& v) { return preimage(p.A(), image(p.E(), v, opt.rank), opt.rank); }, opt);
}

/// Wong sequence of ([E 0], [A I]) on X×Z:
/// 𝒱ᵢ₊₁ = {(x, z) : Ax + z ∈ E·π_x(𝒱ᵢ)}.
inline WongChain augmented_wong_sequence(const Matrix& e, const Matrix& a, const WongOptions& opt = {}) {
  detail::require_shape(e.rows() == a.rows() && e.cols() == a.cols(),
                        "E is " + detail::shape_str(e) + " but A is " + detail::shape_str(a));
  const Index m = e.rows();
  const Index n = e.cols();
  Matrix aug(m, n + m);
  aug << a, Matrix::Identity(m, m);
  return detail::iterate_chain(
      Subspace::full(n + m),
      [&](const Subspace& v) {
        const Subspace x_part = Subspace::span(v.basis().topRows(n), opt.rank, 1.0);
        return preimage(aug, image(e, x_part, opt.rank), opt.rank);
      },
      opt);
}

}  // namespace daelab
