#pragma once

// Dense helpers shared by the analysis modules: numerical rank, orthonormal
// range/kernel bases, weighted norms and Hermitian matrix square roots.

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "daelab/types.hpp"

namespace daelab {

/// Rank decisions: singular values at or below
/// max(relative * sigma_max, absolute) count as zero. A negative
/// `relative` selects the standard max(m,n)*eps.
struct RankTolerance {
  double relative = -1.0;
  double absolute = 0.0;

  double threshold(Index rows, Index cols, double sigma_max) const {
    const double rel = relative < 0.0
                           ? static_cast<double>(std::max<Index>({rows, cols, 1})) * kMachineEps
                           : relative;
    return std::max(rel * sigma_max, absolute);
  }
};

namespace linalg {

inline Index numerical_rank(const RealVector& sv, Index rows, Index cols, const RankTolerance& tol) {
  if (sv.size() == 0) return 0;
  const double thr = tol.threshold(rows, cols, sv(0));
  Index r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  return r;
}

/// Orthonormal basis of ran(M), one column per retained singular value.
inline Matrix range_basis(const Matrix& m, const RankTolerance& tol = {}) {
  if (m.rows() == 0 || m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
  const Index r = numerical_rank(svd.singularValues(), m.rows(), m.cols(), tol);
  return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of ker(M).
inline Matrix kernel_basis(const Matrix& m, const RankTolerance& tol = {}) {
  if (m.cols() == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Index r = numerical_rank(svd.singularValues(), m.rows(), m.cols(), tol);
  return svd.matrixV().rightCols(m.cols() - r);
}

inline double largest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

inline bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= tol * scale;
}

/// Smallest eigenvalue of the Hermitian part of `m`.
inline double min_hermitian_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Hermitian positive-definite square root W^{1/2} and, with `inverse`, W^{-1/2}.
inline Matrix hermitian_sqrt(const Matrix& w, bool inverse = false) {
  const Matrix h = 0.5 * (w + w.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RealVector ev = es.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) {
    const double s = std::sqrt(std::max(ev(i), 0.0));
    ev(i) = inverse ? 1.0 / s : s;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// Orthogonal projector onto the column span of an orthonormal basis.
inline Matrix projector(const Matrix& basis, Index ambient) {
  if (basis.cols() == 0) return Matrix::Zero(ambient, ambient);
  return basis * basis.adjoint();
}

/// Minimum-norm least-squares solution of M x = b.
inline Vector min_norm_solve(const Matrix& m, const Vector& b, const RankTolerance& tol = {}) {
  if (m.cols() == 0) return Vector(0);
  if (m.rows() == 0) return Vector::Zero(m.cols());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  const Index r = numerical_rank(sv, m.rows(), m.cols(), tol);
  Vector coeff = svd.matrixU().leftCols(r).adjoint() * b;
  for (Index i = 0; i < r; ++i) coeff(i) /= sv(i);
  return svd.matrixV().leftCols(r) * coeff;
}

}  // namespace linalg
}  // namespace daelab
