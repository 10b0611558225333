#pragma once

// One-step implicit integration of d/dt(Ex) = Ax + Bu, y = Cx + Du, and
// residual certificates for the classical, mild and weak solution notions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "daelab/consistency.hpp"
#include "daelab/node.hpp"

namespace daelab {

enum class Scheme { implicit_euler, trapezoid };

constexpr std::string_view to_string(Scheme s) { return s == Scheme::implicit_euler ? "implicit_euler" : "trapezoid"; }

/// u(t) = Σ_k c_k t^k + Σ_i (s_i sin(ω_i t) + k_i cos(ω_i t)), with exact jets at t = 0.
class InputSignal {
 public:
  struct Harmonic {
    double omega = 0.0;
    Vector sin_coeff;
    Vector cos_coeff;
  };

  explicit InputSignal(Index dim) : dim_(dim) {}

  static InputSignal zero(Index dim) { return InputSignal(dim); }

  static InputSignal polynomial(std::vector<Vector> coefficients) {
    if (coefficients.empty()) throw Error(ErrorCode::InvalidConfig, "polynomial input needs a coefficient");
    InputSignal s(coefficients.front().size());
    for (const auto& c : coefficients) detail::require_shape(c.size() == s.dim_, "coefficient dimension mismatch");
    s.poly_ = std::move(coefficients);
    return s;
  }

  InputSignal& add_harmonic(double omega, Vector sin_coeff, Vector cos_coeff) {
    detail::require_shape(sin_coeff.size() == dim_ && cos_coeff.size() == dim_, "harmonic dimension mismatch");
    harmonics_.push_back({omega, std::move(sin_coeff), std::move(cos_coeff)});
    return *this;
  }

  Index dim() const noexcept { return dim_; }
  const std::vector<Vector>& polynomial_coefficients() const noexcept { return poly_; }
  const std::vector<Harmonic>& harmonics() const noexcept { return harmonics_; }

  Vector operator()(double t) const {
    Vector u = Vector::Zero(dim_);
    for (auto it = poly_.rbegin(); it != poly_.rend(); ++it) u = u * t + *it;
    for (const auto& h : harmonics_) u += std::sin(h.omega * t) * h.sin_coeff + std::cos(h.omega * t) * h.cos_coeff;
    return u;
  }

  /// u(0), u′(0), …, u^{(order−1)}(0).
  InputJet jet(Index order) const {
    InputJet out;
    double factorial = 1.0;
    for (Index j = 0; j < order; ++j) {
      if (j > 0) factorial *= static_cast<double>(j);
      Vector v = Vector::Zero(dim_);
      if (static_cast<std::size_t>(j) < poly_.size()) v += factorial * poly_[static_cast<std::size_t>(j)];
      for (const auto& h : harmonics_) {
        const double w = std::pow(h.omega, static_cast<double>(j));
        // d^j/dt^j sin(ωt) at 0 cycles 0, ω, 0, −ω^3 ...; cos cycles 1, 0, −ω², 0 ...
        switch (j % 4) {
          case 0: v += w * h.cos_coeff; break;
          case 1: v += w * h.sin_coeff; break;
          case 2: v -= w * h.cos_coeff; break;
          default: v -= w * h.sin_coeff; break;
        }
      }
      out.values.push_back(std::move(v));
    }
    return out;
  }

 private:
  Index dim_;
  std::vector<Vector> poly_;
  std::vector<Harmonic> harmonics_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  std::vector<Vector> outputs;
  Scheme scheme = Scheme::implicit_euler;
  double step = 0.0;
  bool consistent_start = true;    // false only in warn mode
  std::optional<Vector> projected_from;  // original x0 when it was projected

  std::size_t size() const noexcept { return times.size(); }
};

enum class ConsistencyMode { strict, warn, project };

struct IntegrateOptions {
  Scheme scheme = Scheme::implicit_euler;
  double t_end = 1.0;
  double h = 1e-2;
  ConsistencyMode consistency = ConsistencyMode::strict;
  std::optional<Index> chain_length;  // default: algebraic index + 1
};

inline Trajectory integrate(const SystemNode& node, const Vector& x0, const InputSignal& u,
                            const IntegrateOptions& opt = {}) {
  detail::require_shape(node.pencil().is_square(), "integration requires a square pencil");
  detail::require_shape(x0.size() == node.state_dim(), "x0 dimension does not match the node");
  detail::require_shape(u.dim() == node.input_dim(), "input dimension does not match the node");
  if (!(opt.h > 0.0) || !(opt.t_end > 0.0)) throw Error(ErrorCode::InvalidConfig, "h and T must be positive");

  Trajectory traj;
  traj.scheme = opt.scheme;
  Vector x = x0;
  const Index p = opt.chain_length ? *opt.chain_length : default_chain_length(node.pencil());
  const InputJet f_jet = InputJet::through(node.B(), u.jet(p));
  if (!solve_chain(node.E(), node.A(), x0, f_jet, p).feasible) {
    switch (opt.consistency) {
      case ConsistencyMode::strict:
        throw Error(ErrorCode::InconsistentInitialValue, "x0 is not consistent with the input");
      case ConsistencyMode::warn:
        traj.consistent_start = false;
        break;
      case ConsistencyMode::project:
        traj.projected_from = x0;
        x = project_consistent(node.E(), node.A(), x0, f_jet, p);
        break;
    }
  }

  auto steps = static_cast<Index>(std::ceil(opt.t_end / opt.h - 1e-9));
  steps = std::max<Index>(steps, 1);
  const double theta = opt.scheme == Scheme::implicit_euler ? 1.0 : 0.5;
  Eigen::PartialPivLU<Matrix> lu;
  double h = 0.0;
  bool factored = false;
  for (int attempt = 0; attempt < 3 && !factored; ++attempt, ++steps) {
    h = opt.t_end / static_cast<double>(steps);
    const Matrix lhs = node.E() - theta * h * node.A();
    lu.compute(lhs);
    const Matrix inv = lu.inverse();
    factored = inv.allFinite() && detail::one_norm(lhs) * detail::one_norm(inv) < kSingularConditionThreshold;
    if (factored) break;
  }
  if (!factored) throw Error(ErrorCode::NotRegular, "E - h A is singular for every attempted step");
  traj.step = h;

  const Matrix rhs_e = node.E() + (1.0 - theta) * h * node.A();
  traj.times.reserve(static_cast<std::size_t>(steps + 1));
  Vector u_prev = u(0.0);
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  traj.inputs.push_back(u_prev);
  for (Index k = 1; k <= steps; ++k) {
    const double t = opt.t_end * static_cast<double>(k) / static_cast<double>(steps);
    const Vector u_next = u(t);
    const Vector forcing = node.B() * (theta * u_next + (1.0 - theta) * u_prev);
    x = lu.solve(rhs_e * x + h * forcing);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.inputs.push_back(u_next);
    u_prev = u_next;
  }
  traj.outputs.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) traj.outputs.push_back(node.output(traj.states[k], traj.inputs[k]));
  return traj;
}

/// max over interior k of ‖E(x_{k+1}−x_{k−1})/(2h) − Ax_k − Bu_k‖ / (1 + ‖Ax_k + Bu_k‖).
inline double classical_residual(const SystemNode& node, const Trajectory& traj) {
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const Vector drive = node.dynamics(traj.states[k], traj.inputs[k]);
    const Vector deriv = node.E() * (traj.states[k + 1] - traj.states[k - 1]) / (2.0 * traj.step);
    worst = std::max(worst, (deriv - drive).norm() / (1.0 + drive.norm()));
  }
  return worst;
}

/// max over k of ‖Ex_k − Ex_0 − A∫x − B∫u‖ with cumulative trapezoid quadrature.
inline double mild_residual(const SystemNode& node, const Trajectory& traj) {
  if (traj.size() == 0) return 0.0;
  double worst = 0.0;
  Vector qx = Vector::Zero(node.state_dim());
  Vector qu = Vector::Zero(node.input_dim());
  const Vector ex0 = node.E() * traj.states[0];
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double dt = traj.times[k] - traj.times[k - 1];
    qx += 0.5 * dt * (traj.states[k] + traj.states[k - 1]);
    qu += 0.5 * dt * (traj.inputs[k] + traj.inputs[k - 1]);
    const Vector r = node.E() * traj.states[k] - ex0 - node.A() * qx - node.B() * qu;
    worst = std::max(worst, r.norm());
  }
  return worst;
}

/// max over test vectors z and interior k of
/// |d/dt⟨Ex, z⟩ − ⟨x_k, Aᴴz⟩ − ⟨Bu_k, z⟩| (central differences).
/// An empty `tests` uses the canonical basis of the codomain.
inline double weak_residual(const SystemNode& node, const Trajectory& traj, const std::vector<Vector>& tests = {}) {
  std::vector<Vector> zs = tests;
  if (zs.empty())
    for (Index i = 0; i < node.codomain_dim(); ++i) zs.push_back(Vector::Unit(node.codomain_dim(), i));
  double worst = 0.0;
  for (const auto& z : zs) {
    detail::require_shape(z.size() == node.codomain_dim(), "test vector dimension mismatch");
    const Vector ah_z = node.A().adjoint() * z;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
      const Complex d_ex = z.dot(node.E() * (traj.states[k + 1] - traj.states[k - 1])) / (2.0 * traj.step);
      const Complex r = d_ex - ah_z.dot(traj.states[k]) - z.dot(node.B() * traj.inputs[k]);
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

struct SolutionCertificate {
  double classical_residual = 0.0;
  double mild_residual = 0.0;
  double weak_residual = 0.0;
};

inline SolutionCertificate certify(const SystemNode& node, const Trajectory& traj) {
  return {classical_residual(node, traj), mild_residual(node, traj), weak_residual(node, traj)};
}

struct PseudoResolventForm {
  SystemNode node;  // (E R, λE R − I, B, C R, D) with R = (λE−A)⁻¹
  Trajectory trajectory;  // w_k = (λE−A) x_k
};

/// Change of variables w = (λE−A)x. The transformed pencil is
/// (E R, λE R − I), and Ex, y and the mild residual are preserved.
inline PseudoResolventForm pseudo_resolvent_transform(const SystemNode& node, const Trajectory& traj, Complex lambda) {
  const Matrix r = resolvent(node.pencil(), lambda);
  const Matrix shifted = lambda * node.E() - node.A();
  const Matrix er = node.E() * r;
  SystemNode tn(er, lambda * er - Matrix::Identity(er.rows(), er.cols()), node.B(), node.C() * r, node.D());
  Trajectory w = traj;
  for (auto& s : w.states) s = shifted * s;
  return {std::move(tn), std::move(w)};
}

}  // namespace daelab
