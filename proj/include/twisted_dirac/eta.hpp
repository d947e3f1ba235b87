#pragma once

// Eta, xi and rho invariants from spectral data.
//
// Two independent regularizations of eta(s) = sum sign(lambda) |lambda|^{-s}
// at s = 0:
//
//  * Hurwitz: for families {sign (a + d k)} with polynomial multiplicity m(k),
//      sum_k m(k) (a + d k)^{-s} = d^{-s} sum_i b_i zeta_H(s - i, a/d),
//    where m(k) = sum_i b_i (k + a/d)^i. zeta_H(s - i, x) has its only pole at
//    s = i + 1 >= 1, so every family is regular at s = 0 and the value is
//    exact: zeta_H(-i, x) = -B_{i+1}(x) / (i + 1).
//
//  * Heat kernel: eta = pi^{-1/2} int_0^inf tau^{-1/2} Tr(A exp(-tau A^2)) dtau.
//    The truncated trace is integrated by adaptive Gauss-Kronrod quadrature in
//    log(tau) from a window start tau_a, where discarded modes are negligible,
//    with the exact erfc tail beyond tau_max. On (0, tau_a) the trace is
//    replaced by its small-tau expansion sum_beta c_beta tau^beta, fitted on
//    [tau_a, tau_b], and integrated by analytic continuation. The coefficient
//    of tau^{-1/2} would produce a pole of eta(s) at s = 0; it is reported
//    rather than dropped.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twisted_dirac/error.hpp"
#include "twisted_dirac/spectral_models.hpp"

namespace twisted_dirac {

enum class EtaMethod { hurwitz, heat_kernel };

inline std::string to_string(EtaMethod m) { return m == EtaMethod::hurwitz ? "hurwitz" : "heat_kernel"; }

struct EtaValue {
  double eta = 0.0;
  std::int64_t kernel_dim = 0;
  double xi = 0.0;
  EtaMethod method = EtaMethod::hurwitz;
  double error_bound = 0.0;
  bool converged = true;
  // Residue of eta(s) at s = 0 (zero for operators covered by the regularity
  // theorem; nonzero values mark the spectrum as not Dirac-like).
  double pole_residue = 0.0;

  static EtaValue make(double eta, std::int64_t kernel, EtaMethod method, double error_bound) {
    EtaValue v;
    v.eta = eta;
    v.kernel_dim = kernel;
    v.xi = 0.5 * (static_cast<double>(kernel) + eta);
    v.method = method;
    v.error_bound = error_bound;
    return v;
  }
};

struct RhoValue {
  double rho = 0.0;
  EtaValue xi_twisted;
  EtaValue xi_trivial;
  int rank = 1;
  double error_bound() const { return 0.5 * (xi_twisted.error_bound + rank * xi_trivial.error_bound); }
  bool converged() const { return xi_twisted.converged && xi_trivial.converged; }
};

// ---------------------------------------------------------------------------
// Special functions.

namespace detail {

inline const std::vector<long double>& bernoulli_numbers() {
  static const std::vector<long double> table = [] {
    constexpr int kMax = 40;
    std::vector<long double> b(kMax + 1, 0.0L);
    b[0] = 1.0L;
    for (int m = 1; m <= kMax; ++m) {
      long double acc = 0.0L, binom = 1.0L;  // C(m+1, k)
      for (int k = 0; k < m; ++k) {
        acc += binom * b[static_cast<std::size_t>(k)];
        binom = binom * static_cast<long double>(m + 1 - k) / static_cast<long double>(k + 1);
      }
      b[static_cast<std::size_t>(m)] = -acc / static_cast<long double>(m + 1);
    }
    return b;
  }();
  return table;
}

}  // namespace detail

/// Bernoulli polynomial B_n(x), n <= 40.
inline long double bernoulli_polynomial(int n, long double x) {
  const auto& b = detail::bernoulli_numbers();
  if (n < 0 || n >= static_cast<int>(b.size())) throw InvalidInput("bernoulli_polynomial: order out of range");
  long double acc = 0.0L, binom = 1.0L, xp = 1.0L;
  // sum_k C(n,k) B_k x^{n-k}, accumulated from k = n down (Horner in x)
  std::vector<long double> coeff(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    coeff[static_cast<std::size_t>(k)] = binom * b[static_cast<std::size_t>(k)];
    binom = binom * static_cast<long double>(n - k) / static_cast<long double>(k + 1);
  }
  (void)xp;
  for (int k = 0; k <= n; ++k) acc = acc * x + coeff[static_cast<std::size_t>(k)];
  return acc;
}

/// zeta_H(-n, x) = -B_{n+1}(x) / (n + 1), n >= 0.
inline long double hurwitz_zeta_nonpositive(int n, long double x) {
  if (n < 0) throw InvalidInput("hurwitz_zeta_nonpositive: n must be >= 0");
  return -bernoulli_polynomial(n + 1, x) / static_cast<long double>(n + 1);
}

// ---------------------------------------------------------------------------
// Hurwitz engine.

/// Finite-part-free evaluation of sum over families at s = 0. Family checks:
/// offset > 0, step > 0. `finite` eigenvalues with |lambda| <= zero_tol form
/// the kernel.
inline EtaValue eta_hurwitz(const ProgressionSpectrum& spec, double zero_tol = kDefaultZeroTol) {
  long double eta = 0.0L;
  long double magnitude = 0.0L;
  for (const auto& f : spec.families) {
    if (!(f.step > 0.0L)) throw InvalidInput("eta_hurwitz: step must be positive");
    if (!(f.offset > 0.0L)) throw InvalidInput("eta_hurwitz: offset must be positive");
    if (f.sign != 1 && f.sign != -1) throw InvalidInput("eta_hurwitz: sign must be +1 or -1");
    const long double x = f.offset / f.step;
    const auto b = f.multiplicity.power_coefficients_about(x);
    long double family = 0.0L;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const long double term = b[i] * hurwitz_zeta_nonpositive(static_cast<int>(i), x);
      family += term;
      magnitude += std::abs(term);
    }
    eta += f.sign * family;
  }
  std::int64_t kernel = 0;
  for (const auto& e : spec.finite) {
    if (std::abs(e.value) <= zero_tol) {
      kernel += e.multiplicity;
    } else {
      if (std::abs(e.value) <= 2.0 * zero_tol)
        throw ResolutionFailure("eta_hurwitz: eigenvalue too close to zero tolerance", -2 * zero_tol, 2 * zero_tol);
      eta += (e.value > 0 ? 1.0L : -1.0L) * static_cast<long double>(e.multiplicity);
    }
  }
  const double err = 16.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(magnitude + 1.0L);
  return EtaValue::make(static_cast<double>(eta), kernel, EtaMethod::hurwitz, err);
}

// ---------------------------------------------------------------------------
// Heat-kernel engine.

struct HeatKernelOptions {
  int dimension = 3;                 // sets the leading small-tau power tau^{-(dim+1)/2}
  double truncation_tol = 1e-14;     // Gaussian weight of the first discarded level at tau_min
  double window_start = 4.0;         // tau_a / tau_min
  double window_end = 400.0;         // tau_b / tau_min
  int fit_samples = 400;
  int regular_terms = 2;             // fitted powers beyond the singular ones
  double quadrature_tol = 1e-13;
  double target_error = 1e-6;        // converged iff error_bound <= target_error
  double pole_tol = 1e-6;
  double zero_tol = kDefaultZeroTol;
  // Shortest closed geodesic. Closed geodesics of length l add terms of size
  // exp(-l^2 / 4 tau) to the heat trace, so the fit window ends where these
  // drop below truncation_tol.
  std::optional<double> systole;
  double min_window_ratio = 50.0;  // tau_b / tau_a is kept at least this large when the systole caps tau_b
};

namespace detail {

// Spectrum collapsed to (|lambda|, net signed multiplicity); exact
// cancellation for symmetric pairs.
struct SignedLevel {
  long double magnitude;
  long double net;  // sum sign * multiplicity
};

inline std::vector<SignedLevel> signed_levels(const Spectrum& s, double zero_tol) {
  std::vector<SignedLevel> levels;
  for (const auto& e : s.items) {
    if (std::abs(e.value) <= zero_tol) continue;
    levels.push_back({std::abs(static_cast<long double>(e.value)),
                      (e.value > 0 ? 1.0L : -1.0L) * static_cast<long double>(e.multiplicity)});
  }
  std::sort(levels.begin(), levels.end(), [](const SignedLevel& a, const SignedLevel& b) { return a.magnitude < b.magnitude; });
  std::vector<SignedLevel> merged;
  for (const auto& l : levels) {
    if (!merged.empty() && std::abs(merged.back().magnitude - l.magnitude) <= 1e-12L * l.magnitude)
      merged.back().net += l.net;
    else
      merged.push_back(l);
  }
  std::erase_if(merged, [](const SignedLevel& l) { return l.net == 0.0L; });
  return merged;
}

// Tr(A exp(-tau A^2)) over the truncated spectrum.
inline long double heat_trace(const std::vector<SignedLevel>& levels, long double tau) {
  long double acc = 0.0L;
  for (const auto& l : levels) acc += l.net * l.magnitude * std::exp(-tau * l.magnitude * l.magnitude);
  return acc;
}

struct SmallTauFit {
  std::vector<double> powers;
  std::vector<long double> coefficients;
  long double continued_integral = 0.0L;  // int_0^{tau_a} tau^{-1/2} fit, beta != -1/2
  long double pole_coefficient = 0.0L;    // c_{-1/2}
};

inline SmallTauFit fit_small_tau(const std::vector<SignedLevel>& levels, int dimension, int regular_terms,
                                 long double tau_a, long double tau_b, int samples) {
  SmallTauFit fit;
  const int singular = dimension + 1;
  for (int i = 0; i < singular + regular_terms; ++i) fit.powers.push_back((-(dimension + 1) + i) / 2.0);
  const auto cols = static_cast<Eigen::Index>(fit.powers.size());
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  LMatrix a(samples, cols);
  LVector y(samples);
  const long double la = std::log(tau_a), lb = std::log(tau_b);
  for (int r = 0; r < samples; ++r) {
    const long double tau = std::exp(la + (lb - la) * r / (samples - 1));
    // rows weighted by tau^{(dim+1)/2} so every row has comparable size
    const long double w = std::pow(tau, (dimension + 1) / 2.0L);
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = w * std::pow(tau, static_cast<long double>(fit.powers[static_cast<std::size_t>(c)]));
    y(r) = w * heat_trace(levels, tau);
  }
  LVector scale = a.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < cols; ++c)
    if (scale(c) > 0) a.col(c) /= scale(c);
  LVector coef = a.colPivHouseholderQr().solve(y);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const long double cc = coef(c) / scale(c);
    fit.coefficients.push_back(cc);
    const double beta = fit.powers[static_cast<std::size_t>(c)];
    if (beta == -0.5) {
      fit.pole_coefficient = cc;
    } else {
      fit.continued_integral += cc * std::pow(tau_a, static_cast<long double>(beta) + 0.5L) / (beta + 0.5L);
    }
  }
  return fit;
}

}  // namespace detail

/// Heat-kernel eta of a truncated spectrum. Requires spec.complete_below to
/// bound every discarded eigenvalue.
inline EtaValue eta_heat(const Spectrum& spec, const HeatKernelOptions& opt = {}) {
  const std::int64_t kernel = kernel_dimension(spec, opt.zero_tol);
  const auto levels = detail::signed_levels(spec, opt.zero_tol);

  EtaValue result = EtaValue::make(0.0, kernel, EtaMethod::heat_kernel, 0.0);
  if (levels.empty()) return result;  // symmetric (or empty) spectrum: integrand vanishes termwise

  long double lambda_min = std::numeric_limits<long double>::max();
  for (const auto& e : spec.items)
    if (std::abs(e.value) > opt.zero_tol) lambda_min = std::min(lambda_min, std::abs(static_cast<long double>(e.value)));
  const long double cutoff = spec.complete_below;
  if (!(cutoff > lambda_min))
    throw InvalidInput("eta_heat: truncation does not extend beyond the smallest eigenvalue");

  const long double log_inv_tol = std::log(1.0L / opt.truncation_tol);
  const long double tau_min = log_inv_tol / (cutoff * cutoff);
  long double tau_b = opt.window_end * tau_min;
  if (opt.systole) tau_b = std::min(tau_b, static_cast<long double>(*opt.systole) * *opt.systole / (4.0L * log_inv_tol));
  const long double tau_a = std::max(tau_min, std::min<long double>(opt.window_start * tau_min, tau_b / opt.min_window_ratio));
  if (!(tau_b > tau_a)) throw InvalidInput("eta_heat: cutoff too small for the geometry (empty fit window)");
  long double total_weight = 0.0L;
  for (const auto& l : levels) total_weight += std::abs(l.net);
  const long double tau_max = std::max(tau_b, (std::log(1.0L / opt.quadrature_tol) + std::log1p(total_weight)) /
                                                  (lambda_min * lambda_min));

  // int_{tau_a}^{tau_max} tau^{-1/2} F(tau) dtau  in u = log(tau)
  auto integrand = [&](double u) {
    const long double tau = std::exp(static_cast<long double>(u));
    return static_cast<double>(std::sqrt(tau) * detail::heat_trace(levels, tau));
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double quad = 0.0, quad_err = 0.0;
  std::vector<std::pair<double, double>> pieces;
  const double ua = static_cast<double>(std::log(tau_a)), ub = static_cast<double>(std::log(tau_max));
  if (ua < 0.0 && ub > 0.0) pieces = {{ua, 0.0}, {0.0, ub}};
  else pieces = {{ua, ub}};
  for (const auto& [lo, hi] : pieces) {
    double err = 0.0;
    quad += GK::integrate(integrand, lo, hi, 20, opt.quadrature_tol, &err);
    quad_err += err;
  }
  // exact tail of the truncated trace beyond tau_max
  long double tail = 0.0L;
  const long double sqrt_pi = std::sqrt(std::numbers::pi_v<long double>);
  for (const auto& l : levels) tail += l.net * sqrt_pi * std::erfc(l.magnitude * std::sqrt(tau_max));

  const auto fit = detail::fit_small_tau(levels, opt.dimension, opt.regular_terms, tau_a, tau_b, opt.fit_samples);
  const auto alt = detail::fit_small_tau(levels, opt.dimension, opt.regular_terms + 1, tau_a, tau_b, opt.fit_samples);

  const long double eta = (static_cast<long double>(quad) + tail + fit.continued_integral) / sqrt_pi;
  const long double fit_spread = std::abs(fit.continued_integral - alt.continued_integral) / sqrt_pi;
  const long double truncation = total_weight * std::exp(-tau_a * cutoff * cutoff);

  // The fitted tau^{-1/2} coefficient vanishes for Dirac-type spectra, so its
  // size is a direct sample of the fit error (heuristic factor 4).
  const long double pole = 2.0L * fit.pole_coefficient / sqrt_pi;
  result = EtaValue::make(static_cast<double>(eta), kernel, EtaMethod::heat_kernel,
                          static_cast<double>(quad_err / sqrt_pi + fit_spread + truncation + 4.0L * std::abs(pole)));
  result.pole_residue = static_cast<double>(pole);
  result.converged = result.error_bound <= opt.target_error && std::abs(result.pole_residue) <= opt.pole_tol;
  return result;
}

// ---------------------------------------------------------------------------
// Model-level entry points.

struct EngineOptions {
  EtaMethod method = EtaMethod::hurwitz;
  int cutoff = 400;  // heat kernel only
  HeatKernelOptions heat;
  double zero_tol = kDefaultZeroTol;
};

inline EtaValue compute_eta(const SpectralModel& model, const EngineOptions& opt) {
  if (opt.method == EtaMethod::hurwitz) return eta_hurwitz(progression_spectrum(model), opt.zero_tol);
  HeatKernelOptions heat = opt.heat;
  heat.dimension = model.dimension();
  heat.zero_tol = opt.zero_tol;
  if (!heat.systole) heat.systole = model.shortest_closed_geodesic();
  return eta_heat(enumerate_spectrum(model, opt.cutoff), heat);
}

/// rho = xi(twisted) - rank * xi(trivial).
inline RhoValue rho(const SpectralModel& twisted, const SpectralModel& trivial, const EngineOptions& opt) {
  twisted.validate();
  trivial.validate();
  if (!(twisted.geometry == trivial.geometry)) throw InvalidInput("rho: geometries differ");
  if (twisted.flux_shift != trivial.flux_shift) throw InvalidInput("rho: fluxes differ");
  const auto* tb = std::get_if<TrivialBundle>(&trivial.bundle);
  if (!tb) throw InvalidInput("rho: reference model must carry a trivial bundle");
  const int rank = twisted.rank();
  RhoValue r;
  r.rank = rank;
  r.xi_twisted = compute_eta(twisted, opt);
  // the reference is the trivial LINE bundle; rank enters as a factor
  r.xi_trivial = compute_eta(SpectralModel{trivial.geometry, TrivialBundle{1}, trivial.flux_shift}, opt);
  r.rho = r.xi_twisted.xi - rank * r.xi_trivial.xi;
  return r;
}

inline RhoValue rho(const SpectralModel& twisted, const EngineOptions& opt) {
  return rho(twisted, twisted.trivial_counterpart(), opt);
}

struct StabilityRow {
  int cutoff = 0;
  double rho = 0.0;
  double delta = 0.0;        // |rho(this) - rho(previous)|, 0 for the first row
  double error_bound = 0.0;  // engine bound on rho at this cutoff
};

/// rho at increasing cutoffs, each evaluated exactly as a standalone run at
/// that cutoff would be.
inline std::vector<StabilityRow> rho_difference_stability(const SpectralModel& model, std::span<const int> cutoffs,
                                                          EngineOptions opt) {
  if (cutoffs.size() < 3) throw InvalidInput("rho_difference_stability: need at least 3 cutoffs");
  for (std::size_t i = 1; i < cutoffs.size(); ++i)
    if (cutoffs[i] <= cutoffs[i - 1]) throw InvalidInput("rho_difference_stability: cutoffs must increase");
  std::vector<StabilityRow> rows;
  for (int cutoff : cutoffs) {
    opt.cutoff = cutoff;
    const RhoValue r = rho(model, opt);
    rows.push_back({cutoff, r.rho, rows.empty() ? 0.0 : std::abs(r.rho - rows.back().rho), r.error_bound()});
  }
  return rows;
}

/// Successive deltas never grow by more than they can be resolved: each
/// delta carries the error bounds of its two rows, plus a 64 ulp floor.
inline bool deltas_monotone(const std::vector<StabilityRow>& rows) {
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double floor = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(rows[i].rho));
    const double slack = rows[i].error_bound + 2.0 * rows[i - 1].error_bound + rows[i - 2].error_bound;
    if (rows[i].delta > rows[i - 1].delta + slack + floor) return false;
  }
  return true;
}

}  // namespace twisted_dirac
