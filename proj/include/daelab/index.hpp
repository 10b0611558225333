#pragma once

// Algebraic (nilpotency) index from Wong stabilization, and resolvent-index
// estimates from the growth of ‖(λE−A)⁻¹‖ along a ray.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>

#include "daelab/parallel.hpp"
#include "daelab/pencil.hpp"
#include "daelab/subspace.hpp"

namespace daelab {

enum class Ray { real_ray, vertical_line };

constexpr std::string_view to_string(Ray r) { return r == Ray::real_ray ? "real_ray" : "vertical_line"; }

/// Nilpotency index of the infinite part: the step at which the Wong sequence
/// stabilizes (0 for invertible E).
inline Index algebraic_index(const Pencil& p, const WongOptions& opt = {}) {
  return wong_sequence(p, opt).stabilized_at;
}

/// Finite generalized eigenvalues, from the pencil restricted to the Wong limit
/// 𝒱*: with V an orthonormal basis of 𝒱* and W one of E𝒱*, they are the
/// eigenvalues of (WᴴEV)⁻¹(WᴴAV).
inline std::vector<Complex> finite_eigenvalues(const Pencil& p, const WongOptions& opt = {}) {
  const WongChain chain = wong_sequence(p, opt);
  const Subspace& v = chain.limit();
  if (v.dim() == 0) return {};
  const Subspace w = image(p.E(), v, opt.rank);
  detail::require_shape(w.dim() == v.dim(), "E is not injective on the Wong limit");
  const Matrix er = w.basis().adjoint() * p.E() * v.basis();
  const Matrix ar = w.basis().adjoint() * p.A() * v.basis();
  Eigen::ComplexEigenSolver<Matrix> es(er.partialPivLu().solve(ar), false);
  const Vector ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// max Re λ over finite eigenvalues; −∞ when there are none.
inline double spectral_abscissa(const Pencil& p, const WongOptions& opt = {}) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& z : finite_eigenvalues(p, opt)) best = std::max(best, z.real());
  return best;
}

/// Default half-plane abscissa: 1 + max(0, spectral abscissa).
inline double default_omega(const Pencil& p) {
  const double a = spectral_abscissa(p);
  return 1.0 + (std::isfinite(a) ? std::max(0.0, a) : 0.0);
}

struct FitOptions {
  Ray ray = Ray::real_ray;
  std::optional<double> omega;  // default_omega() when absent
  double r_min = 1.0;
  double r_max = 1e4;
  int count = 24;
  Precision precision = Precision::automatic;
  bool compute_algebraic_index = true;
};

struct IndexReport {
  std::optional<Index> algebraic_index;
  double fitted_exponent = 0.0;
  Index fitted_index = 0;
  double omega = 0.0;
  double growth_constant = 0.0;       // smallest C with ‖R(λ)‖ ≤ C|λ|^{p−1} on the samples
  double node_growth_constant = 0.0;  // smallest M with ‖R(λ)‖ ≤ M(1+|λ|^{p−1})
  std::vector<ResolventSample> samples;
  Ray ray = Ray::real_ray;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// max(0, round(slope) + 1).
inline Index index_from_exponent(double slope) {
  return std::max<Index>(0, static_cast<Index>(std::lround(slope)) + 1);
}

/// Least-squares slope of log ‖(λE−A)⁻¹‖ against log |λ| for λ = ω + r
/// (real ray) or λ = ω + i r (vertical line), r log-spaced in [r_min, r_max].
inline IndexReport fit_resolvent_index(const Pencil& p, const FitOptions& opt = {}) {
  require_regular(p);
  if (!(opt.r_min >= 1.0 && opt.r_max > opt.r_min))
    throw Error(ErrorCode::InvalidConfig, "window must satisfy 1 <= r_min < r_max");
  if (opt.count < 8) throw Error(ErrorCode::InvalidConfig, "at least 8 samples are required");

  IndexReport rep;
  rep.ray = opt.ray;
  rep.r_min = opt.r_min;
  rep.r_max = opt.r_max;
  rep.omega = opt.omega ? *opt.omega : default_omega(p);
  if (opt.compute_algebraic_index) rep.algebraic_index = algebraic_index(p);

  const auto count = static_cast<std::size_t>(opt.count);
  rep.samples.resize(count);
  const double lo = std::log(opt.r_min);
  const double hi = std::log(opt.r_max);
  parallel_for(count, [&](std::size_t k) {
    const double r = std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
    const Complex lambda = opt.ray == Ray::real_ray ? Complex(rep.omega + r, 0.0) : Complex(rep.omega, r);
    rep.samples[k] = resolvent_sample(p, lambda, opt.precision);
  });

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : rep.samples) {
    const double x = std::log(std::abs(s.lambda));
    const double y = std::log(s.norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nk = static_cast<double>(count);
  rep.fitted_exponent = (nk * sxy - sx * sy) / (nk * sxx - sx * sx);
  rep.fitted_index = index_from_exponent(rep.fitted_exponent);

  const double pm1 = static_cast<double>(rep.fitted_index) - 1.0;
  for (const auto& s : rep.samples) {
    const double mag = std::abs(s.lambda);
    rep.growth_constant = std::max(rep.growth_constant, s.norm / std::pow(mag, pm1));
    rep.node_growth_constant = std::max(rep.node_growth_constant, s.norm / (1.0 + std::pow(mag, pm1)));
  }
  return rep;
}

/// fitted index and, when known, the algebraic index are both at most `bound`.
inline bool check_index_bound(const IndexReport& rep, Index bound) {
  if (rep.fitted_index > bound) return false;
  return !rep.algebraic_index || *rep.algebraic_index <= bound;
}

}  // namespace daelab
