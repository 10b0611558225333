#pragma once

// Staggered finite differences for the coupled first-order system on ζ ∈ [0, 1]
//
//   d/dt [ε₁ 0; 0 ε₂] (x₁; x₂) = [0 ∂ζ; ∂ζ −r] (x₁; x₂),   x₁(0) = x₂(1) = 0.
//
// x₁ lives on ζ_j = jh, j = 1..n and x₂ on ζ_j = jh, j = 0..n−1, h = 1/n.
// D is the backward difference from x₂-nodes to x₁-nodes (with x₂(1) = 0) and
// −Dᵀ is then the forward difference from x₁-nodes to x₂-nodes (with
// x₁(0) = 0), so A_h = [[0, D], [−Dᵀ, −diag(r)]] has an exactly skew
// off-diagonal part and Re⟨x, A_h x⟩ = −⟨x₂, r x₂⟩.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "daelab/index.hpp"
#include "daelab/pencil.hpp"

namespace daelab::pde {

enum class Regime { wave, diffusion, elliptic, index2, custom };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::wave: return "wave";
    case Regime::diffusion: return "diffusion";
    case Regime::elliptic: return "elliptic";
    case Regime::index2: return "index2";
    case Regime::custom: return "custom";
  }
  return "custom";
}

inline Regime regime_from_string(std::string_view s) {
  if (s == "wave") return Regime::wave;
  if (s == "diffusion") return Regime::diffusion;
  if (s == "elliptic") return Regime::elliptic;
  if (s == "index2") return Regime::index2;
  if (s == "custom") return Regime::custom;
  throw Error(ErrorCode::InvalidConfig, "unknown regime '" + std::string(s) + "'");
}

using Coefficient = std::function<double(double)>;

/// Magnitude of the strictly positive coefficients in the presets. At level 1
/// the index-2 regime is still pre-asymptotic on [1, 0.2n] for n = 200.
inline constexpr double kPresetLevel = 4.0;
/// Diffusion uses a larger ε₁: the witness y = (0, r/‖r‖∞) solves with a
/// boundary layer x₂ = 1 − cosh(kζ)/cosh k, k = √(λε₁) (x₂(1) = 0), whose
/// norm deficit ≈ 0.75/k must stay small across the window.
inline constexpr double kDiffusionLevel = 100.0;

struct PDEConfig {
  Index n = 64;
  Coefficient eps1 = [](double) { return 0.0; };
  Coefficient eps2 = [](double) { return 0.0; };
  Coefficient r = [](double) { return 0.0; };
  Regime regime = Regime::custom;

  double h() const { return 1.0 / static_cast<double>(n); }

  /// wave: ε₁ = ε₂ = level, r = 0; diffusion: ε₁ = level, ε₂ = 0, r = 1;
  /// elliptic: ε₁ = ε₂ = 0, r = 1; index2: ε₁ = 0, ε₂ = level, r = 1.
  /// The default level is kPresetLevel, or kDiffusionLevel for diffusion.
  static PDEConfig preset(Regime regime, Index n, std::optional<double> level_opt = std::nullopt) {
    const double level = level_opt ? *level_opt : regime == Regime::diffusion ? kDiffusionLevel : kPresetLevel;
    PDEConfig c;
    c.n = n;
    c.regime = regime;
    const auto constant = [](double v) { return Coefficient([v](double) { return v; }); };
    switch (regime) {
      case Regime::wave:
        c.eps1 = constant(level);
        c.eps2 = constant(level);
        c.r = constant(0.0);
        break;
      case Regime::diffusion:
        c.eps1 = constant(level);
        c.eps2 = constant(0.0);
        c.r = constant(1.0);
        break;
      case Regime::elliptic:
        c.r = constant(1.0);
        break;
      case Regime::index2:
        c.eps2 = constant(level);
        c.r = constant(1.0);
        break;
      case Regime::custom:
        break;
    }
    return c;
  }
};

struct Grid {
  RealVector x1_nodes;  // jh, j = 1..n
  RealVector x2_nodes;  // jh, j = 0..n−1
  RealVector eps1;      // at x₁ nodes
  RealVector eps2;      // at x₂ nodes
  RealVector r;         // at x₂ nodes
};

inline Grid sample_grid(const PDEConfig& cfg) {
  const Index n = cfg.n;
  const double h = cfg.h();
  Grid g;
  g.x1_nodes.resize(n);
  g.x2_nodes.resize(n);
  g.eps1.resize(n);
  g.eps2.resize(n);
  g.r.resize(n);
  for (Index j = 0; j < n; ++j) {
    g.x1_nodes(j) = static_cast<double>(j + 1) * h;
    g.x2_nodes(j) = static_cast<double>(j) * h;
    g.eps1(j) = cfg.eps1(g.x1_nodes(j));
    g.eps2(j) = cfg.eps2(g.x2_nodes(j));
    g.r(j) = cfg.r(g.x2_nodes(j));
  }
  return g;
}

inline void validate(const PDEConfig& cfg) {
  if (cfg.n < 8) throw Error(ErrorCode::InvalidConfig, "n must be at least 8");
  if (!cfg.eps1 || !cfg.eps2 || !cfg.r) throw Error(ErrorCode::InvalidConfig, "coefficient function missing");
  const Grid g = sample_grid(cfg);
  const auto min_of = [](const RealVector& v) { return v.minCoeff(); };
  const auto max_of = [](const RealVector& v) { return v.cwiseAbs().maxCoeff(); };
  if (min_of(g.eps1) < 0.0 || min_of(g.eps2) < 0.0 || min_of(g.r) < 0.0)
    throw Error(ErrorCode::InvalidConfig, "coefficients must be nonnegative");
  const auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, what);
  };
  switch (cfg.regime) {
    case Regime::wave:
      need(min_of(g.eps1) > 0.0 && min_of(g.eps2) > 0.0, "wave regime needs eps1, eps2 >= c > 0");
      break;
    case Regime::diffusion:
      need(min_of(g.eps1) > 0.0 && min_of(g.r) > 0.0 && max_of(g.eps2) == 0.0,
           "diffusion regime needs eps1, r >= c > 0 and eps2 = 0");
      break;
    case Regime::elliptic:
      need(max_of(g.eps1) == 0.0 && max_of(g.eps2) == 0.0 && min_of(g.r) > 0.0,
           "elliptic regime needs eps1 = eps2 = 0 and r >= c > 0");
      break;
    case Regime::index2:
      need(max_of(g.eps1) == 0.0 && min_of(g.eps2) > 0.0, "index2 regime needs eps1 = 0 and eps2 >= c > 0");
      break;
    case Regime::custom:
      break;
  }
}

struct Discretization {
  Pencil pencil;  // (E_h, A_h) with state and codomain weights h·I
  Matrix D;       // n x n backward difference
  Grid grid;
  double h = 0.0;
};

inline Discretization discretize(const PDEConfig& cfg) {
  validate(cfg);
  const Index n = cfg.n;
  const double h = cfg.h();
  Grid g = sample_grid(cfg);

  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = -1.0 / h;
    if (i + 1 < n) d(i, i + 1) = 1.0 / h;
  }
  Matrix a = Matrix::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n) = d;
  a.bottomLeftCorner(n, n) = -d.transpose();
  a.bottomRightCorner(n, n).diagonal() = -g.r.cast<Complex>();
  Matrix e = Matrix::Zero(2 * n, 2 * n);
  e.diagonal().head(n) = g.eps1.cast<Complex>();
  e.diagonal().tail(n) = g.eps2.cast<Complex>();

  const Matrix w = h * Matrix::Identity(2 * n, 2 * n);
  return {Pencil(std::move(e), std::move(a), w, w), std::move(d), std::move(g), h};
}

/// Re⟨x, A_h x⟩ + ⟨x₂, r x₂⟩ in the h-weighted inner product; zero up to round-off.
inline double dissipativity_gap(const Discretization& disc, const Vector& x) {
  const Index n = disc.D.rows();
  const Vector ax = disc.pencil.A() * x;
  const Vector x2 = x.tail(n);
  const double re = disc.h * x.dot(ax).real();
  const double damp = disc.h * x2.dot(disc.grid.r.cast<Complex>().asDiagonal() * x2).real();
  return re + damp;
}

struct GridPair {
  RealVector x1;  // at x₁ nodes
  RealVector x2;  // at x₂ nodes
};

/// Closed-form inverse of the continuous operator,
///   x₁(ζ) = ∫₀^ζ y₂ − ∫₀^ζ r(s) ∫_s^1 y₁ dv ds,   x₂(ζ) = −∫_ζ^1 y₁,
/// by composite trapezoid quadrature on ζ_j = jh, j = 0..n. `y1`, `y2` hold
/// the n+1 node samples.
inline GridPair apply_A_inverse_exact(const PDEConfig& cfg, const RealVector& y1, const RealVector& y2) {
  validate(cfg);
  const Index n = cfg.n;
  const double h = cfg.h();
  if (y1.size() != n + 1 || y2.size() != n + 1)
    throw Error(ErrorCode::InvalidConfig, "grid functions need n+1 node samples");
  RealVector tail(n + 1);  // ∫_{ζ_j}^1 y₁
  tail(n) = 0.0;
  for (Index j = n - 1; j >= 0; --j) tail(j) = tail(j + 1) + 0.5 * h * (y1(j) + y1(j + 1));
  RealVector rt(n + 1);
  for (Index j = 0; j <= n; ++j) rt(j) = cfg.r(static_cast<double>(j) * h) * tail(j);

  GridPair out;
  out.x1.resize(n);
  out.x2.resize(n);
  double int_y2 = 0.0;
  double int_rt = 0.0;
  for (Index j = 1; j <= n; ++j) {
    int_y2 += 0.5 * h * (y2(j - 1) + y2(j));
    int_rt += 0.5 * h * (rt(j - 1) + rt(j));
    out.x1(j - 1) = int_y2 - int_rt;
  }
  for (Index j = 0; j < n; ++j) out.x2(j) = -tail(j);
  return out;
}

using GridFunction = std::function<double(double)>;

/// h-weighted distance between A_h⁻¹y and the quadrature of the closed form.
inline double inverse_error(const PDEConfig& cfg, const GridFunction& y1, const GridFunction& y2) {
  const Discretization disc = discretize(cfg);
  const Index n = cfg.n;
  Vector rhs(2 * n);
  for (Index j = 0; j < n; ++j) {
    rhs(j) = y1(disc.grid.x1_nodes(j));
    rhs(n + j) = y2(disc.grid.x2_nodes(j));
  }
  Eigen::PartialPivLU<Matrix> lu(disc.pencil.A());
  const Vector x = lu.solve(rhs);
  if (!x.allFinite()) throw Error(ErrorCode::NotRegular, "A_h is singular");

  RealVector s1(n + 1), s2(n + 1);
  for (Index j = 0; j <= n; ++j) {
    const double z = static_cast<double>(j) * disc.h;
    s1(j) = y1(z);
    s2(j) = y2(z);
  }
  const GridPair exact = apply_A_inverse_exact(cfg, s1, s2);
  double acc = 0.0;
  for (Index j = 0; j < n; ++j) {
    acc += std::norm(x(j) - exact.x1(j));
    acc += std::norm(x(n + j) - exact.x2(j));
  }
  return std::sqrt(disc.h * acc);
}

/// Smooth right-hand sides used for the inverse comparison.
inline std::vector<std::pair<GridFunction, GridFunction>> smooth_test_functions() {
  using std::numbers::pi;
  return {
      {[](double z) { return std::sin(pi * z); }, [](double) { return 0.0; }},
      {[](double) { return 0.0; }, [](double z) { return std::cos(pi * z); }},
      {[](double z) { return z * z; }, [](double z) { return std::exp(z); }},
      {[](double z) { return std::cos(2.0 * pi * z) + z; }, [](double z) { return std::sin(3.0 * z); }},
  };
}

/// max over smooth_test_functions() of inverse_error.
inline double inverse_agreement(const PDEConfig& cfg) {
  double worst = 0.0;
  for (const auto& [y1, y2] : smooth_test_functions()) worst = std::max(worst, inverse_error(cfg, y1, y2));
  return worst;
}

struct RegimeExperiment {
  IndexReport real;      // real ray: real resolvent index
  IndexReport vertical;  // vertical line: complex resolvent index
};

/// Default frequency window [1, 0.2 n].
inline std::pair<double, double> default_window(const PDEConfig& cfg) { return {1.0, 0.2 * static_cast<double>(cfg.n)}; }

inline RegimeExperiment regime_index_experiment(const PDEConfig& cfg,
                                                std::optional<std::pair<double, double>> window = std::nullopt,
                                                int count = 24) {
  const Discretization disc = discretize(cfg);
  const auto [lo, hi] = window ? *window : default_window(cfg);
  FitOptions opt;
  opt.r_min = lo;
  opt.r_max = hi;
  opt.count = count;
  opt.precision = Precision::standard;
  opt.omega = default_omega(disc.pencil);
  opt.compute_algebraic_index = false;
  const Index alg = algebraic_index(disc.pencil);
  RegimeExperiment out;
  opt.ray = Ray::real_ray;
  out.real = fit_resolvent_index(disc.pencil, opt);
  opt.ray = Ray::vertical_line;
  out.vertical = fit_resolvent_index(disc.pencil, opt);
  out.real.algebraic_index = alg;
  out.vertical.algebraic_index = alg;
  return out;
}

/// ‖(λE_h − A_h)⁻¹ y‖ for y = (0, r/‖r‖_∞) and real λ log-spaced over the
/// window. For diffusion with r ≡ 1 the continuous solution is
/// x₂ = 1 − cosh(kζ)/cosh k, k = √(λε₁), so the norm stays near 1 once the
/// boundary layer at ζ = 1 is thin.
inline std::vector<ResolventSample> lower_bound_witness(const PDEConfig& cfg,
                                                        std::optional<std::pair<double, double>> window = std::nullopt,
                                                        int count = 16) {
  const Discretization disc = discretize(cfg);
  const Index n = cfg.n;
  const double r_inf = disc.grid.r.cwiseAbs().maxCoeff();
  if (!(r_inf > 0.0)) throw Error(ErrorCode::InvalidConfig, "witness needs r not identically zero");
  Vector y = Vector::Zero(2 * n);
  y.tail(n) = (disc.grid.r / r_inf).cast<Complex>();
  const auto [lo, hi] = window ? *window : default_window(cfg);
  std::vector<ResolventSample> out;
  for (int k = 0; k < count; ++k) {
    const double lambda = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(count - 1));
    const Matrix m = lambda * disc.pencil.E() - disc.pencil.A();
    Eigen::PartialPivLU<Matrix> lu(m);
    const Vector x = lu.solve(y);
    if (!x.allFinite()) throw Error(ErrorCode::NotRegular, "lambda E_h - A_h is singular");
    const ResolventSample full = resolvent_sample(disc.pencil, lambda);
    out.push_back({Complex(lambda, 0.0), disc.pencil.state_weight().vector_norm(x), full.condition});
  }
  return out;
}

}  // namespace daelab::pde
