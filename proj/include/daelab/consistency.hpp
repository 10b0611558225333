#pragma once

// Consistent initial values: the chain E x_{j+1} = A x_j + f^{(j)}(0),
// j = 0..p−1, and the augmented-Wong necessary condition on (x(t), f(t)).

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "daelab/index.hpp"
#include "daelab/linalg.hpp"
#include "daelab/subspace.hpp"

namespace daelab {

inline constexpr double kChainFeasibilityTol = 1e-8;

/// Derivatives f(0), f′(0), …, f^{(order−1)}(0).
struct InputJet {
  std::vector<Vector> values;

  Index order() const noexcept { return static_cast<Index>(values.size()); }

  /// Jet of f = B u from the jet of u.
  static InputJet through(const Matrix& b, const InputJet& u_jet) {
    InputJet out;
    out.values.reserve(u_jet.values.size());
    for (const auto& v : u_jet.values) out.values.push_back(b * v);
    return out;
  }
};

struct ChainCertificate {
  std::vector<Vector> chain;     // x₀, …, x_p
  std::vector<double> residuals; // ‖E x_{j+1} − A x_j − f^{(j)}(0)‖ per level
  std::vector<double> scales;    // 1 + ‖A x_j + f^{(j)}(0)‖ per level
  bool feasible = false;
  std::optional<Index> first_failing_level;
};

namespace detail {

/// Block-bidiagonal system in (x₁, …, x_p): level j reads E x_{j+1} − A x_j = f_j.
inline Matrix chain_matrix(const Matrix& e, const Matrix& a, Index p) {
  const Index m = e.rows();
  const Index n = e.cols();
  Matrix k = Matrix::Zero(m * p, n * p);
  for (Index j = 0; j < p; ++j) {
    k.block(j * m, j * n, m, n) = e;
    if (j > 0) k.block(j * m, (j - 1) * n, m, n) = -a;
  }
  return k;
}

inline void check_chain_args(const Matrix& e, const Matrix& a, const Vector& x0, const InputJet& jet, Index p) {
  require_shape(e.rows() == a.rows() && e.cols() == a.cols(), "E and A shapes differ");
  require_shape(x0.size() == e.cols(), "x0 dimension does not match the pencil");
  if (p < 1) throw Error(ErrorCode::InvalidConfig, "chain length p must be at least 1");
  if (jet.order() < p) throw Error(ErrorCode::InvalidConfig, "input jet shorter than chain length p");
  for (Index j = 0; j < p; ++j)
    require_shape(jet.values[static_cast<std::size_t>(j)].size() == e.rows(), "jet entry has wrong dimension");
}

}  // namespace detail

/// Solves the chain for x₁..x_p jointly, as the minimum-norm least-squares
/// solution of the stacked system, and audits each level.
inline ChainCertificate solve_chain(const Matrix& e, const Matrix& a, const Vector& x0, const InputJet& jet, Index p) {
  detail::check_chain_args(e, a, x0, jet, p);
  const Index m = e.rows();
  const Index n = e.cols();
  const Matrix k = detail::chain_matrix(e, a, p);
  Vector rhs(m * p);
  for (Index j = 0; j < p; ++j) rhs.segment(j * m, m) = jet.values[static_cast<std::size_t>(j)];
  rhs.head(m) += a * x0;
  const Vector y = linalg::min_norm_solve(k, rhs);

  ChainCertificate cert;
  cert.chain.push_back(x0);
  for (Index j = 0; j < p; ++j) cert.chain.push_back(y.segment(j * n, n));
  cert.feasible = true;
  for (Index j = 0; j < p; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const Vector drive = a * cert.chain[ju] + jet.values[ju];
    const double res = (e * cert.chain[ju + 1] - drive).norm();
    const double scale = 1.0 + drive.norm();
    cert.residuals.push_back(res);
    cert.scales.push_back(scale);
    if (res > kChainFeasibilityTol * scale && cert.feasible) {
      cert.feasible = false;
      cert.first_failing_level = j;
    }
  }
  return cert;
}

/// Chain length used for membership: algebraic index + 1.
inline Index default_chain_length(const Pencil& p) { return algebraic_index(p) + 1; }

struct Membership {
  bool consistent = false;
  Index chain_length = 0;
  ChainCertificate certificate;
};

inline Membership consistent_membership(const Matrix& e, const Matrix& a, const Vector& x0, const InputJet& jet,
                                        std::optional<Index> p = std::nullopt) {
  const Pencil pencil(e, a);
  require_regular(pencil);
  Membership out;
  out.chain_length = p ? *p : default_chain_length(pencil);
  out.certificate = solve_chain(e, a, x0, jet, out.chain_length);
  out.consistent = out.certificate.feasible;
  return out;
}

/// Closest x₀' to x₀ for which the chain of length p is feasible:
/// x₀' = x₀ + M⁺(g − M x₀) with M = (I − P)K₀, g = (I − P)F, where K₀ is the
/// x₀-column of the chain system and P projects onto the range of the rest.
inline Vector project_consistent(const Matrix& e, const Matrix& a, const Vector& x0, const InputJet& jet, Index p) {
  detail::check_chain_args(e, a, x0, jet, p);
  const Index m = e.rows();
  const Index n = e.cols();
  const Matrix rest = detail::chain_matrix(e, a, p);
  Matrix k0 = Matrix::Zero(m * p, n);
  k0.topRows(m) = -a;
  Vector f(m * p);
  for (Index j = 0; j < p; ++j) f.segment(j * m, m) = jet.values[static_cast<std::size_t>(j)];

  // (I − P)K₀ carries rounding noise in the directions P should remove, so
  // both rank decisions use the chain tolerance
  const RankTolerance tol{kChainRankTol};
  const Matrix q = linalg::range_basis(rest, tol);
  const Matrix mm = k0 - q * (q.adjoint() * k0);
  const Vector g = f - q * (q.adjoint() * f);
  const Vector projected = x0 + linalg::min_norm_solve(mm, g - mm * x0, tol);
  if (!solve_chain(e, a, projected, jet, p).feasible)
    throw Error(ErrorCode::InconsistentInitialValue, "no consistent initial value exists for this input jet");
  return projected;
}

/// Largest distance of a sample (x, f) from the limit of the augmented Wong
/// sequence. Classical solutions stay inside that limit for all t.
inline double necessary_projection_check(const Matrix& e, const Matrix& a,
                                         const std::vector<std::pair<Vector, Vector>>& samples,
                                         const WongOptions& opt = {}) {
  const WongChain chain = augmented_wong_sequence(e, a, opt);
  const Subspace& limit = chain.limit();
  const Index n = e.cols();
  const Index m = e.rows();
  double worst = 0.0;
  for (const auto& [x, f] : samples) {
    detail::require_shape(x.size() == n && f.size() == m, "sample dimensions do not match the pencil");
    Vector v(n + m);
    v << x, f;
    worst = std::max(worst, limit.distance(v));
  }
  return worst;
}

}  // namespace daelab
