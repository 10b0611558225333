#pragma once

// Port-Hamiltonian descriptor systems
//   d/dt Ex = (J−R)Qx + (B−P)u,   y = (B+P)ᴴQx + (S−N)u
// with J, N skew-Hermitian and EᴴQ, W = [[R, P], [Pᴴ, S]] Hermitian PSD.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "daelab/index.hpp"
#include "daelab/node.hpp"
#include "daelab/simulate.hpp"

namespace daelab {

inline constexpr double kStructureTol = 1e-10;
inline constexpr double kQConditionLimit = 1e10;
inline constexpr double kDissipationSlack = 10.0;

struct PHForm {
  Matrix E, J, R, Q;  // n x n
  Matrix B, P;        // n x u
  Matrix S, N;        // u x u

  Index state_dim() const { return E.rows(); }
  Index port_dim() const { return B.cols(); }

  Matrix W() const {
    const Index n = state_dim();
    const Index m = port_dim();
    Matrix w(n + m, n + m);
    w << R, P, P.adjoint(), S;
    return w;
  }
};

struct StructureCheck {
  std::string name;
  double violation = 0.0;  // measured defect; for PSD checks, max(0, −λ_min)
  double tolerance = 0.0;
  bool passed = false;
};

struct ValidationReport {
  std::vector<StructureCheck> checks;
  bool passed = false;
};

namespace detail {

inline void require_ph_shapes(const PHForm& f) {
  const Index n = f.E.rows();
  const Index m = f.B.cols();
  const auto sq = [](const Matrix& x, Index d) { return x.rows() == d && x.cols() == d; };
  require_shape(sq(f.E, n) && sq(f.J, n) && sq(f.R, n) && sq(f.Q, n), "E, J, R, Q must be n x n");
  require_shape(f.B.rows() == n && f.P.rows() == n && f.P.cols() == m, "B, P must be n x u");
  require_shape(sq(f.S, m) && sq(f.N, m), "S, N must be u x u");
}

inline StructureCheck skew_check(std::string name, const Matrix& x) {
  const double v = (x + x.adjoint()).norm();
  const double tol = kStructureTol * std::max(1.0, x.norm());
  return {std::move(name), v, tol, v <= tol};
}

inline StructureCheck hermitian_check(std::string name, const Matrix& x) {
  const double v = (x - x.adjoint()).norm();
  const double tol = kStructureTol * std::max(1.0, x.norm());
  return {std::move(name), v, tol, v <= tol};
}

inline StructureCheck psd_check(std::string name, const Matrix& x) {
  const double v = std::max(0.0, -linalg::min_hermitian_eigenvalue(x));
  const double tol = kStructureTol * std::max(1.0, x.norm());
  return {std::move(name), v, tol, v <= tol};
}

}  // namespace detail

/// Structural checks; tolerances are 1e-10 relative to max(1, ‖·‖).
inline ValidationReport validate_ph(const PHForm& f) {
  detail::require_ph_shapes(f);
  ValidationReport rep;
  const Matrix ehq = f.E.adjoint() * f.Q;
  const Matrix w = f.W();
  rep.checks.push_back(detail::skew_check("J skew-Hermitian", f.J));
  rep.checks.push_back(detail::skew_check("N skew-Hermitian", f.N));
  rep.checks.push_back(detail::hermitian_check("E^H Q Hermitian", ehq));
  rep.checks.push_back(detail::psd_check("E^H Q positive semidefinite", ehq));
  rep.checks.push_back(detail::hermitian_check("W Hermitian", w));
  rep.checks.push_back(detail::psd_check("W positive semidefinite", w));
  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const auto& c) { return c.passed; });
  return rep;
}

/// A = (J−R)Q, B_node = B−P, C = (B+P)ᴴQ, D = S−N.
inline SystemNode to_node(const PHForm& f) {
  const ValidationReport rep = validate_ph(f);
  if (!rep.passed) {
    std::string failed;
    for (const auto& c : rep.checks)
      if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
    throw Error(ErrorCode::ValidationFailed, "pH structure violated: " + failed);
  }
  return {f.E, (f.J - f.R) * f.Q, f.B - f.P, (f.B + f.P).adjoint() * f.Q, f.S - f.N};
}

/// ½ Re⟨Ex, Qx⟩.
inline double hamiltonian(const PHForm& f, const Vector& x) { return 0.5 * (f.Q * x).dot(f.E * x).real(); }

struct EnergyLedger {
  std::vector<double> times;
  std::vector<double> hamiltonian;
  std::vector<double> power;               // Re⟨u, y⟩
  std::vector<double> cumulative_supply;   // trapezoid ∫₀ᵗ Re⟨u, y⟩
  std::vector<double> tolerance;           // c·h·(1 + max‖x‖²)
  bool satisfied = false;
  double worst_margin = 0.0;  // max_k (ℋ_k − ℋ_0 − supply_k − tol_k); ≤ 0 when satisfied
};

/// ℋ(x_k) − ℋ(x_0) ≤ Re∫₀^{t_k}⟨u, y⟩ + c·h·(1 + max‖x‖²) at every grid point.
inline EnergyLedger dissipation_check(const PHForm& f, const Trajectory& traj, double c = kDissipationSlack) {
  detail::require_ph_shapes(f);
  EnergyLedger led;
  const std::size_t k_max = traj.size();
  if (k_max == 0) {
    led.satisfied = true;
    return led;
  }
  detail::require_shape(traj.states[0].size() == f.state_dim(), "trajectory state dimension mismatch");
  detail::require_shape(traj.inputs[0].size() == f.port_dim() && traj.outputs[0].size() == f.port_dim(),
                        "trajectory port dimension mismatch");
  double max_x2 = 0.0;
  for (const auto& x : traj.states) max_x2 = std::max(max_x2, x.squaredNorm());
  const double tol = c * traj.step * (1.0 + max_x2);

  double supply = 0.0;
  led.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < k_max; ++k) {
    const double pw = traj.outputs[k].dot(traj.inputs[k]).real();
    if (k > 0) supply += 0.5 * (traj.times[k] - traj.times[k - 1]) * (pw + led.power.back());
    led.times.push_back(traj.times[k]);
    led.hamiltonian.push_back(hamiltonian(f, traj.states[k]));
    led.power.push_back(pw);
    led.cumulative_supply.push_back(supply);
    led.tolerance.push_back(tol);
    led.worst_margin = std::max(led.worst_margin, led.hamiltonian[k] - led.hamiltonian[0] - supply - tol);
  }
  led.satisfied = led.worst_margin <= 0.0;
  return led;
}

/// Equivalent form in z = Qx: (EQ⁻¹, J, R, I, B, P, S, N).
inline PHForm reduce_q_invertible(const PHForm& f) {
  detail::require_ph_shapes(f);
  const Index n = f.state_dim();
  Eigen::PartialPivLU<Matrix> lu(f.Q);
  const Matrix q_inv = lu.inverse();
  const double cond = q_inv.allFinite() ? detail::one_norm(f.Q) * detail::one_norm(q_inv)
                                        : std::numeric_limits<double>::infinity();
  if (!(cond < kQConditionLimit)) throw Error(ErrorCode::QSingular, "Q is singular or too ill-conditioned");
  PHForm out = f;
  out.E = f.E * q_inv;
  out.Q = Matrix::Identity(n, n);
  return out;
}

inline bool q_invertible(const PHForm& f) {
  try {
    reduce_q_invertible(f);
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::QSingular) return false;
    throw;
  }
}

struct PHIndexAudit {
  Index algebraic_index = 0;
  IndexReport real;     // real ray
  IndexReport complex;  // vertical line
  bool hypotheses_hold = false;  // Q invertible and EᴴQ PSD
  bool violation = false;
};

inline constexpr Index kComplexIndexBound = 3;
inline constexpr Index kRealIndexBound = 2;

/// Fitted real/complex resolvent indices of the node pencil (E, (J−R)Q),
/// checked against the bounds 3 (complex) and 2 (real) when Q is invertible.
inline FitOptions ph_fit_defaults() {
  FitOptions o;
  o.r_min = 10.0;
  o.r_max = 1e5;
  o.count = 16;
  return o;
}

inline PHIndexAudit ph_index_audit(const PHForm& f, FitOptions base = ph_fit_defaults()) {
  const SystemNode node = to_node(f);
  PHIndexAudit audit;
  audit.algebraic_index = algebraic_index(node.pencil());
  if (!base.omega) base.omega = default_omega(node.pencil());
  base.compute_algebraic_index = false;
  base.ray = Ray::real_ray;
  audit.real = fit_resolvent_index(node.pencil(), base);
  base.ray = Ray::vertical_line;
  audit.complex = fit_resolvent_index(node.pencil(), base);
  audit.real.algebraic_index = audit.algebraic_index;
  audit.complex.algebraic_index = audit.algebraic_index;

  const ValidationReport rep = validate_ph(f);
  const bool psd = std::all_of(rep.checks.begin(), rep.checks.end(), [](const StructureCheck& c) {
    return c.name.rfind("E^H Q", 0) != 0 || c.passed;
  });
  audit.hypotheses_hold = psd && q_invertible(f);
  audit.violation = audit.hypotheses_hold && (!check_index_bound(audit.complex, kComplexIndexBound) ||
                                              !check_index_bound(audit.real, kRealIndexBound));
  return audit;
}

/// max over sample vectors of Re⟨Qx, (J−R)Qx⟩ / ‖Qx‖².
inline double dissipativity_defect(const PHForm& f, const std::vector<Vector>& xs) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& x : xs) {
    const Vector qx = f.Q * x;
    const double nq = qx.squaredNorm();
    if (nq == 0.0) continue;
    worst = std::max(worst, qx.dot((f.J - f.R) * qx).real() / nq);
  }
  return worst;
}

}  // namespace daelab
