#pragma once

// Inversion of λE−A carried out in a wider floating-point type. High-index
// pencils have ‖(λE−A)⁻¹‖ ~ |λ|^{p−1}, which exhausts double precision long
// before |λ| = 1e6; the pencil is assembled and factored in the wide type and
// only the final inverse is rounded back to double.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "daelab/types.hpp"

namespace daelab::detail {

#if defined(__SIZEOF_FLOAT128__) && !defined(__clang__)
using WideReal = __float128;
inline constexpr double kWideEps = 1.925929944387235853e-34;  // 2^-112
#else
using WideReal = long double;
inline constexpr double kWideEps = static_cast<double>(std::numeric_limits<long double>::epsilon());
#endif

struct WideComplex {
  WideReal re{0};
  WideReal im{0};

  static WideComplex from(Complex z) { return {WideReal(z.real()), WideReal(z.imag())}; }
  Complex to_double() const { return {static_cast<double>(re), static_cast<double>(im)}; }

  friend WideComplex operator+(WideComplex a, WideComplex b) { return {a.re + b.re, a.im + b.im}; }
  friend WideComplex operator-(WideComplex a, WideComplex b) { return {a.re - b.re, a.im - b.im}; }
  friend WideComplex operator*(WideComplex a, WideComplex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend WideComplex operator/(WideComplex a, WideComplex b) {
    const WideReal den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
  }
  WideReal l1() const { return (re < 0 ? -re : re) + (im < 0 ? -im : im); }
};

struct WideInverse {
  Matrix inverse;
  double condition_1norm;  // ‖M‖₁‖M⁻¹‖₁, infinite when a pivot vanished
};

/// Inverts M = λE − A with assembly, LU and back substitution in WideReal.
inline WideInverse wide_shifted_inverse(const Matrix& e, const Matrix& a, Complex lambda) {
  const Index n = e.rows();
  const auto idx = [n](Index i, Index j) { return static_cast<std::size_t>(i * n + j); };
  std::vector<WideComplex> lu(static_cast<std::size_t>(n * n));
  const WideComplex wl = WideComplex::from(lambda);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      lu[idx(i, j)] = wl * WideComplex::from(e(i, j)) - WideComplex::from(a(i, j));

  WideReal norm_m = 0;
  for (Index j = 0; j < n; ++j) {
    WideReal col = 0;
    for (Index i = 0; i < n; ++i) col += lu[idx(i, j)].l1();
    if (col > norm_m) norm_m = col;
  }

  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  const double inf = std::numeric_limits<double>::infinity();

  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    WideReal best = lu[idx(k, k)].l1();
    for (Index i = k + 1; i < n; ++i) {
      const WideReal v = lu[idx(i, k)].l1();
      if (v > best) { best = v; piv = i; }
    }
    if (best == 0) return {Matrix::Zero(n, n), inf};
    if (piv != k) {
      for (Index j = 0; j < n; ++j) std::swap(lu[idx(k, j)], lu[idx(piv, j)]);
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(piv)]);
    }
    for (Index i = k + 1; i < n; ++i) {
      const WideComplex f = lu[idx(i, k)] / lu[idx(k, k)];
      lu[idx(i, k)] = f;
      for (Index j = k + 1; j < n; ++j) lu[idx(i, j)] = lu[idx(i, j)] - f * lu[idx(k, j)];
    }
  }

  std::vector<WideComplex> inv(static_cast<std::size_t>(n * n));
  std::vector<WideComplex> col(static_cast<std::size_t>(n));
  for (Index c = 0; c < n; ++c) {
    for (Index i = 0; i < n; ++i)
      col[static_cast<std::size_t>(i)] = WideComplex{perm[static_cast<std::size_t>(i)] == c ? WideReal(1) : WideReal(0), 0};
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < i; ++j)
        col[static_cast<std::size_t>(i)] = col[static_cast<std::size_t>(i)] - lu[idx(i, j)] * col[static_cast<std::size_t>(j)];
    for (Index i = n - 1; i >= 0; --i) {
      for (Index j = i + 1; j < n; ++j)
        col[static_cast<std::size_t>(i)] = col[static_cast<std::size_t>(i)] - lu[idx(i, j)] * col[static_cast<std::size_t>(j)];
      col[static_cast<std::size_t>(i)] = col[static_cast<std::size_t>(i)] / lu[idx(i, i)];
    }
    for (Index i = 0; i < n; ++i) inv[idx(i, c)] = col[static_cast<std::size_t>(i)];
  }

  WideReal norm_inv = 0;
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    WideReal s = 0;
    for (Index i = 0; i < n; ++i) {
      s += inv[idx(i, j)].l1();
      out(i, j) = inv[idx(i, j)].to_double();
    }
    if (s > norm_inv) norm_inv = s;
  }
  return {out, static_cast<double>(norm_m) * static_cast<double>(norm_inv)};
}

}  // namespace daelab::detail
