#pragma once

// Spectral flow along u -> D + u c(H), u in [0, u_max].
//
// Convention: sf = N_neg(0) - N_neg(u_max), zero counted as nonnegative. An
// eigenvalue rising through zero at u* counts +1 when u* is in (0, u_max]; one
// falling through zero counts -1 when u* is in [0, u_max). Reversing the path
// maps one rule onto the other, so sf(reverse) = -sf holds exactly.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "twisted_dirac/clifford.hpp"
#include "twisted_dirac/error.hpp"
#include "twisted_dirac/eta.hpp"
#include "twisted_dirac/spectral_models.hpp"

namespace twisted_dirac {

struct AffineLine {
  double intercept = 0.0;
  double slope = 0.0;
  std::int64_t multiplicity = 1;

  double at(double u) const { return intercept + slope * u; }
};

struct AffinePath {
  std::vector<AffineLine> lines;
  double u_max = 1.0;

  AffinePath reversed() const {
    AffinePath r{{}, u_max};
    r.lines.reserve(lines.size());
    for (const auto& l : lines) r.lines.push_back({l.at(u_max), -l.slope, l.multiplicity});
    return r;
  }
};

struct Crossing {
  double u = 0.0;
  std::int64_t multiplicity = 0;
  int direction = 0;  // +1 upward, -1 downward
};

struct SfResult {
  std::int64_t flow = 0;
  std::vector<Crossing> crossings;
  std::pair<bool, bool> endpoint_kernel{false, false};

  bool convention_sensitive() const { return endpoint_kernel.first || endpoint_kernel.second; }
};

namespace detail {

inline void merge_crossings(std::vector<Crossing>& c, double tol) {
  std::sort(c.begin(), c.end(), [](const Crossing& a, const Crossing& b) {
    return a.u != b.u ? a.u < b.u : a.direction < b.direction;
  });
  std::vector<Crossing> out;
  for (const auto& x : c) {
    if (!out.empty() && out.back().direction == x.direction && std::abs(out.back().u - x.u) <= tol)
      out.back().multiplicity += x.multiplicity;
    else
      out.push_back(x);
  }
  c = std::move(out);
}

}  // namespace detail

/// Exact crossing enumeration for affine eigenvalue lines. Lines whose value
/// at an endpoint is within zero_tol of zero raise the endpoint flag.
inline SfResult sf_affine(const AffinePath& path, double zero_tol = 1e-12) {
  if (!(path.u_max > 0.0)) throw InvalidInput("sf_affine: u_max must be positive");
  SfResult r;
  for (const auto& l : path.lines) {
    if (l.multiplicity < 1) throw InvalidInput("sf_affine: multiplicity must be >= 1");
    if (l.intercept == 0.0 && l.slope == 0.0) throw InvalidInput("sf_affine: line identically zero");
    const double v0 = l.at(0.0), v1 = l.at(path.u_max);
    if (std::abs(v0) <= zero_tol) r.endpoint_kernel.first = true;
    if (std::abs(v1) <= zero_tol) r.endpoint_kernel.second = true;
    if (l.slope == 0.0) continue;
    const double u = -l.intercept / l.slope;
    const bool counted = l.slope > 0 ? (u > 0.0 && u <= path.u_max) : (u >= 0.0 && u < path.u_max);
    if (!counted) continue;
    const int dir = l.slope > 0 ? 1 : -1;
    r.crossings.push_back({u, l.multiplicity, dir});
    r.flow += dir * l.multiplicity;
  }
  detail::merge_crossings(r.crossings, 0.0);
  return r;
}

/// Lines of the path u -> D + u t on the model, with u in [0, 1] and t the
/// model's flux. Every level that can reach zero on the path is included.
inline AffinePath affine_path_from_model(const SpectralModel& model) {
  const double t = model.flux_shift;
  const SpectralModel base = model.with_flux(0.0);
  int cutoff = 4;
  Spectrum s = enumerate_spectrum(base, cutoff);
  while (s.complete_below <= std::abs(t) + 1.0) {
    cutoff *= 2;
    s = enumerate_spectrum(base, cutoff);
  }
  AffinePath p{{}, 1.0};
  for (const auto& e : s.items) p.lines.push_back({e.value, t, e.multiplicity});
  return p;
}

// ---------------------------------------------------------------------------
// Matrix paths.

using HermitianFamily = std::function<CMatrix(double)>;

struct SfMatrixOptions {
  double min_width = 1e-12;  // bisection stops at this parameter width (relative to max(1, |u|))
  int max_depth = 80;
};

namespace detail {

struct Sample {
  double u;
  Eigen::VectorXd eig;
  CMatrix a;
  std::int64_t negatives() const { return (eig.array() < 0.0).count(); }
  double min_abs() const { return eig.cwiseAbs().minCoeff(); }
};

// Upper bound on the spectral norm: sqrt(max column sum * max row sum).
inline double norm_bound(const CMatrix& m) {
  const double col = m.cwiseAbs().colwise().sum().maxCoeff();
  const double row = m.cwiseAbs().rowwise().sum().maxCoeff();
  return std::sqrt(col * row);
}

inline Sample sample(const HermitianFamily& f, double u) {
  Sample s{u, {}, f(u)};
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s.a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ResolutionFailure("sf_matrix: eigensolver failed", u, u);
  s.eig = es.eigenvalues();
  return s;
}

// No eigenvalue can reach zero between a and b when each endpoint's spectrum
// is farther from zero than the operator moves on its half of the interval
// (Weyl; exact for affine families).
inline bool certified_clean(const HermitianFamily& f, const Sample& a, const Sample& b) {
  const CMatrix mid = f(0.5 * (a.u + b.u));
  const double da = norm_bound(mid - a.a);
  const double db = norm_bound(b.a - mid);
  return a.min_abs() > da && b.min_abs() > db;
}

inline void refine(const HermitianFamily& f, const Sample& a, const Sample& b, const SfMatrixOptions& opt,
                   int depth, std::vector<Crossing>& out) {
  if (a.negatives() == b.negatives() && certified_clean(f, a, b)) return;
  const double width = b.u - a.u;
  if (width <= opt.min_width * std::max(1.0, std::abs(a.u)) || depth >= opt.max_depth) {
    const std::int64_t change = a.negatives() - b.negatives();
    const double move = norm_bound(b.a - a.a);
    std::int64_t near_zero = 0;
    for (const auto* s : {&a, &b})
      near_zero = std::max<std::int64_t>(near_zero, (s->eig.array().abs() <= move + 1e-14).count());
    // an up/down pair hidden in the interval needs two near-zero eigenvalues
    // beyond those accounted for by the net change
    if (near_zero - std::abs(change) >= 2)
      throw ResolutionFailure("sf_matrix: crossings of opposite direction not separable", a.u, b.u);
    if (change != 0) out.push_back({0.5 * (a.u + b.u), std::abs(change), change > 0 ? 1 : -1});
    return;
  }
  const Sample m = sample(f, 0.5 * (a.u + b.u));
  refine(f, a, m, opt, depth + 1, out);
  refine(f, m, b, opt, depth + 1, out);
}

}  // namespace detail

/// Spectral flow of a Hermitian matrix family sampled on an increasing grid,
/// with every sign change localized by bisection.
inline SfResult sf_matrix(const HermitianFamily& family, const std::vector<double>& grid,
                          const SfMatrixOptions& opt = {}, double zero_tol = 1e-12) {
  if (grid.size() < 2) throw InvalidInput("sf_matrix: grid needs at least two samples");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidInput("sf_matrix: grid must be strictly increasing");
  SfResult r;
  detail::Sample prev = detail::sample(family, grid.front());
  const detail::Sample first = prev;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    detail::Sample cur = detail::sample(family, grid[i]);
    detail::refine(family, prev, cur, opt, 0, r.crossings);
    prev = std::move(cur);
  }
  r.endpoint_kernel = {first.min_abs() <= zero_tol, prev.min_abs() <= zero_tol};
  r.flow = first.negatives() - prev.negatives();
  detail::merge_crossings(r.crossings, 1e-9);
  return r;
}

/// Affine family A0 + u B from two dense matrices.
inline HermitianFamily affine_family(CMatrix a0, CMatrix b) {
  return [a0 = std::move(a0), b = std::move(b)](double u) -> CMatrix { return a0 + u * b; };
}

// ---------------------------------------------------------------------------
// Spectral flow / eta identity on 3-dimensional models with H = t vol.

inline constexpr double kPi = std::numbers::pi;

struct Cor33Report {
  double t = 0.0;
  double eta_twisted = 0.0;
  double eta_untwisted = 0.0;
  std::int64_t sf = 0;
  double h = 0.0;          // integral of H over Y
  double predicted = 0.0;  // 2 sf + rank h / (2 pi^2)
  double residual = 0.0;
  double error_bound = 0.0;
  bool converged = true;
};

namespace detail {

inline void require_three_dimensional(const SpectralModel& m, const char* who) {
  m.validate();
  if (m.dimension() != 3) throw InvalidInput(std::string(who) + ": model must be 3-dimensional");
}

inline std::pair<EtaValue, EtaValue> endpoint_etas(const SpectralModel& model, const EngineOptions& opt,
                                                   const char* who) {
  const EtaValue twisted = compute_eta(model, opt);
  const EtaValue untwisted = compute_eta(model.with_flux(0.0), opt);
  if (twisted.kernel_dim != 0 || untwisted.kernel_dim != 0)
    throw InvalidInput(std::string(who) + ": endpoint operator has a kernel (both must be invertible)");
  return {twisted, untwisted};
}

}  // namespace detail

/// |(eta(D_H) - eta(D)) - 2 sf - rank h/(2 pi^2)| with h = t vol(Y).
inline Cor33Report check_cor33(const SpectralModel& model, const EngineOptions& opt) {
  detail::require_three_dimensional(model, "check_cor33");
  const auto [twisted, untwisted] = detail::endpoint_etas(model, opt, "check_cor33");
  Cor33Report r;
  r.t = model.flux_shift;
  r.eta_twisted = twisted.eta;
  r.eta_untwisted = untwisted.eta;
  r.sf = sf_affine(affine_path_from_model(model)).flow;
  r.h = model.flux_shift * model.volume();
  r.predicted = 2.0 * static_cast<double>(r.sf) + model.rank() * r.h / (2.0 * kPi * kPi);
  r.residual = std::abs((r.eta_twisted - r.eta_untwisted) - r.predicted);
  r.error_bound = twisted.error_bound + untwisted.error_bound;
  r.converged = twisted.converged && untwisted.converged;
  return r;
}

/// Normalization of the reduced integral term, calibrated so that the
/// index-density identity and check_cor33 coincide in dimension 3.
inline constexpr double kReducedDensityConstant = -1.0 / (4.0 * kPi * kPi);

struct Prop31Report {
  double t = 0.0;
  std::int64_t sf = 0;
  double half_eta_difference = 0.0;
  double integral_term = 0.0;  // rank * C * h
  double calibrated_constant = kReducedDensityConstant;
  double residual = 0.0;  // |sf - integral_term - half_eta_difference|
  double error_bound = 0.0;
};

/// Reduced index-density identity, for flat tori and round spheres where
/// only the degree-0 term of the A-hat form survives against H.
inline Prop31Report check_prop31_reduced(const SpectralModel& model, const EngineOptions& opt) {
  detail::require_three_dimensional(model, "check_prop31_reduced");
  if (!std::holds_alternative<Torus3>(model.geometry) && !std::holds_alternative<Sphere3>(model.geometry))
    throw Unsupported("check_prop31_reduced: only flat tori and round spheres reduce");
  Prop31Report r;
  r.t = model.flux_shift;
  if (model.flux_shift == 0.0) return r;
  const auto [twisted, untwisted] = detail::endpoint_etas(model, opt, "check_prop31_reduced");
  r.sf = sf_affine(affine_path_from_model(model)).flow;
  r.half_eta_difference = 0.5 * (twisted.eta - untwisted.eta);
  r.integral_term = model.rank() * kReducedDensityConstant * model.flux_shift * model.volume();
  r.residual = std::abs(static_cast<double>(r.sf) - r.integral_term - r.half_eta_difference);
  r.error_bound = 0.5 * (twisted.error_bound + untwisted.error_bound);
  return r;
}

}  // namespace twisted_dirac
