#pragma once

// Acceptance suite: one pass/fail verdict per criterion, with the tolerances
// and runtime budgets fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "twisted_dirac/twisted_dirac.hpp"

namespace twisted_dirac::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

namespace tol {
inline constexpr double algebra = 1e-12;
inline constexpr double eta_hurwitz = 1e-10;
inline constexpr double eta_heat = 1e-6;
inline constexpr int circle_heat_cutoff = 2000;
inline constexpr int sphere_heat_cutoff = 400;
inline constexpr double cor33 = 1e-8;
inline constexpr double lw_torus = 1e-10;
inline constexpr int lw_cutoff = 8;
inline constexpr double lw_algebraic = 1e-12;
inline constexpr double psc_rho = 1e-8;
inline constexpr double spectrum_scaling = 1e-10;
inline constexpr double conformal_rho = 1e-8;
inline constexpr double stability_final_delta = 1e-6;
}  // namespace tol

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline CriterionResult timed(int id, std::string title, double budget, const std::function<bool(std::string&)>& body) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  r.budget_seconds = budget;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body(r.detail);
  } catch (const std::exception& e) {
    r.detail += std::string(r.detail.empty() ? "" : "; ") + "exception: " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (ok && r.seconds > budget) r.detail += "; over runtime budget";
  r.passed = ok && r.seconds <= budget;
  return r;
}

inline double hermitian_defect(const CMatrix& a) { return (a - a.adjoint()).norm(); }
inline double skew_defect(const CMatrix& a) { return (a + a.adjoint()).norm(); }

}  // namespace detail

inline CriterionResult clifford_algebra() {
  return detail::timed(1, "Clifford and grading algebra", 1.0, [](std::string& d) {
    double worst = 0.0;
    for (int n : {1, 3, 5}) {
      const GammaRep rep(n);
      worst = std::max(worst, rep.clifford_residual());
      for (const auto& g : rep.gammas()) {
        worst = std::max(worst, detail::skew_defect(g));
        worst = std::max(worst, (g * g.adjoint() - rep.identity()).norm());
      }
      for (int k = 0; k <= n; ++k) {
        const CMatrix a = clifford_action(rep, FormComponent::random(n, k, 100 + 10 * n + k));
        const bool self = degree_adjointness(k) == Adjointness::self_adjoint;
        worst = std::max(worst, self ? detail::hermitian_defect(a) : detail::skew_defect(a));
        if (k % 2 == 1) worst = std::max(worst, detail::hermitian_defect(i_pow((k - 1) / 2 + 1) * a));
      }
    }
    for (int m : {1, 2}) {
      const EvenGammaRep rep(m);
      worst = std::max(worst, rep.clifford_residual());
      for (int k = 0; k <= 2 * m; ++k)
        worst = std::max(worst, grading_anticommute_check(rep, FormComponent::random(2 * m, k, 200 + k)));
      worst = std::max(worst, boundary_reduction_check(m));
    }
    d = "max residual " + detail::fmt(worst) + " (tol " + detail::fmt(tol::algebra) + ")";
    return worst <= tol::algebra;
  });
}

inline CriterionResult eta_oracles() {
  return detail::timed(2, "Eta oracle and engine agreement", 30.0, [](std::string& d) {
    double worst_h = 0.0, worst_k = 0.0;
    bool ok = true;
    for (int i = 1; i <= 9; ++i) {
      const double a = 0.1 * i;
      const SpectralModel m{Circle{1.0}, CircleHolonomy{a}, 0.0};
      EngineOptions h;
      worst_h = std::max(worst_h, std::abs(compute_eta(m, h).eta - (1.0 - 2.0 * a)));
      EngineOptions k;
      k.method = EtaMethod::heat_kernel;
      k.cutoff = tol::circle_heat_cutoff;
      worst_k = std::max(worst_k, std::abs(compute_eta(m, k).eta - (1.0 - 2.0 * a)));
    }
    ok = worst_h <= tol::eta_hurwitz && worst_k <= tol::eta_heat;
    int agree = 0;
    double worst_gap = 0.0;
    const double shifts[] = {-2.2, -1.3, -0.7, -0.1, 0.05, 0.1, 0.35, 0.9, 1.2, 2.2};
    for (double t : shifts) {
      const SpectralModel m{Sphere3{1.0}, TrivialBundle{1}, t};
      const EtaValue h = compute_eta(m, EngineOptions{});
      EngineOptions ko;
      ko.method = EtaMethod::heat_kernel;
      ko.cutoff = tol::sphere_heat_cutoff;
      const EtaValue k = compute_eta(m, ko);
      const double gap = std::abs(h.eta - k.eta);
      worst_gap = std::max(worst_gap, gap);
      if (gap <= h.error_bound + k.error_bound && k.converged) ++agree;
    }
    ok = ok && agree == 10;
    d = "circle hurwitz " + detail::fmt(worst_h) + ", heat " + detail::fmt(worst_k) + "; sphere agreement " +
        std::to_string(agree) + "/10 (max gap " + detail::fmt(worst_gap) + ")";
    return ok;
  });
}

inline CriterionResult spectral_flow_identity() {
  return detail::timed(3, "Spectral flow and eta difference on S^3", 120.0, [](std::string& d) {
    double worst = 0.0, worst_t = 0.0;
    bool sf_ok = true;
    int points = 0;
    for (int i = 0; i < 24; ++i) {
      const double t = -2.9 + 0.25 * i;
      const SpectralModel m{Sphere3{1.0}, TrivialBundle{1}, t};
      const Cor33Report r = check_cor33(m, EngineOptions{});
      ++points;
      if (r.residual > worst) {
        worst = r.residual;
        worst_t = t;
      }
      if (t > 1.5 && t < 2.5 && r.sf != 2) sf_ok = false;
      if (t < -1.5 && t > -2.5 && r.sf != -2) sf_ok = false;
      if (std::abs(t) < 1.5 && r.sf != 0) sf_ok = false;
    }
    d = std::to_string(points) + " flux values; sf " + std::string(sf_ok ? "as predicted" : "MISMATCH") +
        "; max residual " + detail::fmt(worst) + " at t = " + detail::fmt(worst_t) + " (tol " + detail::fmt(tol::cor33) + ")";
    return sf_ok && worst <= tol::cor33;
  });
}

inline CriterionResult weitzenbock_identities() {
  return detail::timed(4, "Weitzenbock identities", 60.0, [](std::string& d) {
    const SpectralModel torus{Torus3{}, TrivialBundle{1}, 0.0};
    const LwReport c = lw_check_deg3(torus, TorusFlux::constant(0.7), tol::lw_cutoff);
    const LwReport h = lw_check_deg3(torus, TorusFlux::cosine(0, 0.5), tol::lw_cutoff);
    double alg = 0.0;
    for (int n : {3, 5}) {
      const GammaRep rep(n);
      alg = std::max(alg, lw_check_general(rep, FluxForm({FormComponent::volume(n, 1.3)})));
      alg = std::max(alg, lw_check_general(rep, FluxForm({FormComponent::random(n, 3, 31 + n)})));
      alg = std::max(alg, lw_check_general(rep, FluxForm({FormComponent::random(n, 1, 41 + n),
                                                          FormComponent::random(n, 3, 43 + n)})));
      if (n == 5)
        alg = std::max(alg, lw_check_general(rep, FluxForm({FormComponent::random(n, 1, 51), FormComponent::random(n, 3, 53),
                                                            FormComponent::random(n, 5, 55)})));
    }
    const double torus_worst = std::max(c.residual_deg3, h.residual_deg3);
    d = "torus N=" + std::to_string(tol::lw_cutoff) + " constant " + detail::fmt(c.residual_deg3) + ", harmonic " +
        detail::fmt(h.residual_deg3) + " (" + std::to_string(h.modes_compared) + " interior modes); algebraic " +
        detail::fmt(alg);
    return torus_worst <= tol::lw_torus && alg <= tol::lw_algebraic;
  });
}

inline CriterionResult psc_stability() {
  return detail::timed(5, "Positive scalar curvature stability", 60.0, [](std::string& d) {
    const PscThreshold th = psc_threshold(6.0, 1.0);
    const bool u0_ok = std::abs(th.u0 - std::sqrt(3.0) / 2.0) <= 1e-15;
    const std::vector<double> grid{0.0, 0.2, 0.4, 0.6, 0.8, 0.86};
    double worst_rho = 0.0;
    std::int64_t sf = 0;
    double min_gap = 1e300;
    const SpectralModel models[] = {{Sphere3{1.0}, TrivialBundle{1}, 0.0},
                                    {Lens{3, 1.0}, LensCharacter{3, 1}, 0.0},
                                    {Lens{3, 1.0}, LensCharacter{3, 2}, 0.0}};
    for (const auto& m : models) {
      const PscReport r = psc_stability_sweep(m, 1.0, grid, EngineOptions{});
      worst_rho = std::max(worst_rho, r.rho_max_deviation);
      for (const auto& row : r.rows) {
        sf += std::abs(row.sf);
        min_gap = std::min(min_gap, row.min_abs_eigenvalue);
      }
    }
    // second engine on one lens point
    EngineOptions heat;
    heat.method = EtaMethod::heat_kernel;
    heat.cutoff = 800;
    const SpectralModel lens{Lens{3, 1.0}, LensCharacter{3, 1}, 0.4};
    const double cross = std::abs(rho(lens, heat).rho - rho(lens, EngineOptions{}).rho);
    d = "u0 " + detail::fmt(th.u0) + "; min |lambda| " + detail::fmt(min_gap) + "; sf " + std::to_string(sf) +
        "; rho deviation " + detail::fmt(worst_rho) + "; engine gap " + detail::fmt(cross);
    return u0_ok && sf == 0 && worst_rho <= tol::psc_rho && cross <= tol::psc_rho && min_gap > 0.0;
  });
}

inline CriterionResult conformal_invariance() {
  return detail::timed(6, "Conformal invariance of rho", 30.0, [](std::string& d) {
    const std::vector<double> grid{-1.0, -0.5, 0.5, 1.0};
    const SpectralModel models[] = {{Circle{1.0}, CircleHolonomy{0.25}, 0.0},
                                    {Sphere3{1.0}, TrivialBundle{1}, 0.1},
                                    {Lens{3, 1.0}, LensCharacter{3, 1}, 0.1}};
    double scaling = 0.0, dev = 0.0;
    for (const auto& m : models) {
      for (double u : grid) scaling = std::max(scaling, spectrum_scaling_deviation(m, ConformalScale(u), 60));
      dev = std::max(dev, check_rho_conformal(m, grid, EngineOptions{}).max_deviation);
    }
    d = "spectrum scaling " + detail::fmt(scaling) + "; rho deviation " + detail::fmt(dev);
    return scaling <= tol::spectrum_scaling && dev <= tol::conformal_rho;
  });
}

inline CriterionResult truncation_stability() {
  return detail::timed(7, "Truncation stability of rho", 60.0, [](std::string& d) {
    struct Case {
      const char* name;
      SpectralModel model;
      std::vector<int> cutoffs;
    };
    const Case cases[] = {
        {"circle", {Circle{1.0}, CircleHolonomy{0.25}, 0.0}, {100, 200, 400}},
        {"sphere", {Sphere3{1.0}, TrivialBundle{2}, 0.1}, {50, 100, 200}},
        {"lens", {Lens{3, 1.0}, LensCharacter{3, 1}, 0.0}, {50, 100, 200}},
        {"lens_flux", {Lens{3, 1.0}, LensCharacter{3, 1}, 0.1}, {50, 100, 200}},
        {"torus", {Torus3{}, TorusHolonomy{{0.25, 0.0, 0.0}}, 0.1}, {24, 32, 48}},
    };
    EngineOptions heat;
    heat.method = EtaMethod::heat_kernel;
    bool ok = true;
    for (const auto& c : cases) {
      const auto rows = rho_difference_stability(c.model, c.cutoffs, heat);
      const bool mono = deltas_monotone(rows);
      const double last = rows.back().delta;
      ok = ok && mono && last <= tol::stability_final_delta;
      d += std::string(d.empty() ? "" : "; ") + c.name + " final " + detail::fmt(last) + (mono ? "" : " (not monotone)");
    }
    return ok;
  });
}

inline std::vector<CriterionResult> run_all() {
  return {clifford_algebra(),  eta_oracles(),          spectral_flow_identity(), weitzenbock_identities(),
          psc_stability(),     conformal_invariance(), truncation_stability()};
}

}  // namespace twisted_dirac::acceptance
