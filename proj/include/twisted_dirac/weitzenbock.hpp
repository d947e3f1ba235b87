#pragma once

// Weitzenbock identities for D_H = D + c(H) and the positive scalar curvature
// threshold derived from them.
//
// On the flat torus with H = f vol (automatically closed):
//   D_H^2 = Delta_H - 2|H|^2,   Delta_H = -sum_j (nabla_j + c(iota_j H))^2,
// and, in the general form, D_H^2 = Delta_H + c(H)^2 + sum_j c(iota_j H)^2.
// Both are compared as matrices on rows whose Fourier support lies inside the
// truncation box.
//
// The algebraic identity for constant odd forms reads the square of an
// iterated contraction as its wedge square:
//   c(H)^2 + sum_j c(iota_j H)^2
//     = sum_{|J| >= 2} (-1)^{k(k+1)/2} (1 - k) c((iota_J H) ^ (iota_J H)),  k = |J|.

#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "twisted_dirac/clifford.hpp"
#include "twisted_dirac/error.hpp"
#include "twisted_dirac/eta.hpp"
#include "twisted_dirac/spectral_flow.hpp"
#include "twisted_dirac/spectral_models.hpp"
#include "twisted_dirac/torus_operator.hpp"

namespace twisted_dirac {

struct LwReport {
  double residual_deg3 = 0.0;
  double residual_general = 0.0;
  int modes_compared = 0;
  int cutoff = 0;
  int bandwidth = 0;
  double operator_scale = 0.0;  // norm bound of D_H^2 on the same rows
};

namespace detail {

// sqrt(||A||_1 ||A||_inf) restricted to the selected rows; bounds the
// spectral norm of the row block.
inline double row_block_norm_bound(const SparseCMatrix& m, const std::vector<char>& keep_row) {
  std::vector<double> col(static_cast<std::size_t>(m.cols()), 0.0);
  double row_max = 0.0;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    if (!keep_row[static_cast<std::size_t>(r)]) continue;
    double row = 0.0;
    for (SparseCMatrix::InnerIterator it(m, r); it; ++it) {
      row += std::abs(it.value());
      col[static_cast<std::size_t>(it.col())] += std::abs(it.value());
    }
    row_max = std::max(row_max, row);
  }
  const double col_max = col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
  return std::sqrt(col_max * row_max);
}

}  // namespace detail

/// Residuals of both torus identities for H = (model.flux_shift + f) vol.
inline LwReport lw_check_deg3(const SpectralModel& model, const TorusFlux& h3, int cutoff) {
  const TorusFourierBasis basis(model, cutoff);
  const TorusFlux total = h3.plus_constant(model.flux_shift);
  const int b = total.bandwidth();
  if (cutoff < 2 * b) throw InvalidInput("lw_check_deg3: cutoff must be at least twice the flux bandwidth");

  const GammaRep rep(3);
  const Multivector h_unit = FluxForm({FormComponent::volume(3, 1.0)}).to_multivector();
  const CMatrix c_h = clifford_action(rep, h_unit);
  const TorusFlux f2 = total.product(total);

  const SparseCMatrix d_h = build_torus_operator(model, h3, cutoff).matrix;
  const SparseCMatrix d_h_sq = d_h * d_h;

  SparseCMatrix laplacian(basis.dimension(), basis.dimension());
  SparseCMatrix contraction_sq(basis.dimension(), basis.dimension());
  for (int j = 0; j < 3; ++j) {
    const CMatrix c_j = clifford_action(rep, interior(j, h_unit));
    const SparseCMatrix covariant = basis.derivative(j) + basis.multiplication(total, c_j);
    laplacian -= SparseCMatrix(covariant * covariant);
    contraction_sq += basis.multiplication(f2, c_j * c_j);
  }
  // |f vol|^2 = f^2 in the orthonormal frame
  const SparseCMatrix norm_sq = basis.multiplication(f2, CMatrix::Identity(2, 2));
  const SparseCMatrix c_h_sq = basis.multiplication(f2, c_h * c_h);

  std::vector<char> keep(static_cast<std::size_t>(basis.dimension()), 0);
  LwReport r;
  r.cutoff = cutoff;
  r.bandwidth = b;
  for (int m = 0; m < basis.mode_count(); ++m) {
    if (!basis.in_box(basis.mode_at(m), b)) continue;
    ++r.modes_compared;
    for (int s = 0; s < basis.fiber_dim(); ++s) keep[static_cast<std::size_t>(m * basis.fiber_dim() + s)] = 1;
  }
  const SparseCMatrix deg3 = d_h_sq - laplacian + 2.0 * norm_sq;
  const SparseCMatrix general = d_h_sq - laplacian - c_h_sq - contraction_sq;
  r.residual_deg3 = detail::row_block_norm_bound(deg3, keep);
  r.residual_general = detail::row_block_norm_bound(general, keep);
  r.operator_scale = detail::row_block_norm_bound(d_h_sq, keep);
  return r;
}

struct WeitzenbockSides {
  CMatrix lhs;  // c(H)^2 + sum_j c(iota_j H)^2
  CMatrix rhs;  // contraction sum
};

inline WeitzenbockSides weitzenbock_sides(const GammaRep& rep, const FluxForm& h) {
  const int n = rep.dim();
  for (const auto& c : h.components())
    if (c.max_index() >= n) throw InvalidInput("lw_check_general: form index exceeds the dimension");
  const Multivector hm = h.to_multivector();
  WeitzenbockSides s;
  const CMatrix ch = clifford_action(rep, hm);
  s.lhs = ch * ch;
  for (int j = 0; j < n; ++j) {
    const CMatrix cj = clifford_action(rep, interior(j, hm));
    s.lhs += cj * cj;
  }
  s.rhs = CMatrix::Zero(rep.spinor_dim(), rep.spinor_dim());
  // iterate over index sets J = {j_1 < ... < j_k} as bitmasks
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const int k = std::popcount(mask);
    if (k < 2) continue;
    Multivector f = hm;
    for (int j = n - 1; j >= 0; --j)
      if (mask & (1u << j)) f = interior(j, f);
    std::erase_if(f, [](const auto& kv) { return kv.second == Complex(0.0); });
    if (f.empty()) continue;
    const double sign = ((k * (k + 1) / 2) % 2 == 0 ? 1.0 : -1.0) * (1 - k);
    s.rhs += sign * clifford_action(rep, wedge(f, f));
  }
  return s;
}

/// Frobenius norm of lhs - rhs for a constant flux in dimension rep.dim().
inline double lw_check_general(const GammaRep& rep, const FluxForm& h) {
  const auto s = weitzenbock_sides(rep, h);
  return (s.lhs - s.rhs).norm();
}

// ---------------------------------------------------------------------------
// Positive scalar curvature.

struct PscThreshold {
  double r_min = 0.0;
  double h_norm = 0.0;
  double u0 = 0.0;
};

/// R/4 - 2 u^2 |H|^2 > 0 for every u < u0.
inline PscThreshold psc_threshold(double r_min, double h_norm) {
  if (!(r_min > 0.0) || !std::isfinite(r_min)) throw InvalidInput("psc_threshold: r_min must be positive");
  if (!(h_norm > 0.0) || !std::isfinite(h_norm)) throw InvalidInput("psc_threshold: h_norm must be positive");
  return {r_min, h_norm, std::sqrt(r_min / 8.0) / h_norm};
}

struct PscRow {
  double u = 0.0;
  double min_abs_eigenvalue = 0.0;
  std::int64_t kernel_dim = 0;
  std::int64_t sf = 0;
  double rho = 0.0;
  double rho_error_bound = 0.0;
};

struct PscReport {
  PscThreshold threshold;
  std::optional<double> first_kernel_u;  // smallest u > 0 with a kernel
  std::vector<PscRow> rows;
  double rho_max_deviation = 0.0;  // max |rho(u) - rho(grid front)|
  std::int64_t total_sf = 0;
};

namespace detail {

inline double min_abs_level(const ProgressionSpectrum& p) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& f : p.families) m = std::min(m, static_cast<double>(f.offset));
  for (const auto& e : p.finite) m = std::min(m, std::abs(e.value));
  return m;
}

}  // namespace detail

/// Sweep of u H (H = h_norm vol) over u_grid below u0 on a positively curved
/// model. A kernel below u0 contradicts the threshold and raises
/// InvariantViolation.
inline PscReport psc_stability_sweep(const SpectralModel& model, double h_norm, const std::vector<double>& u_grid,
                                     const EngineOptions& opt) {
  model.validate();
  if (!std::holds_alternative<Sphere3>(model.geometry) && !std::holds_alternative<Lens>(model.geometry))
    throw InvalidInput("psc_stability_sweep: model must have positive scalar curvature (sphere3 or lens)");
  if (u_grid.empty()) throw InvalidInput("psc_stability_sweep: empty grid");
  PscReport rep;
  rep.threshold = psc_threshold(model.scalar_curvature(), h_norm);
  for (double u : u_grid)
    if (!(u >= 0.0 && u < rep.threshold.u0))
      throw InvalidInput("psc_stability_sweep: grid must lie in [0, u0)");

  // first kernel: smallest u > 0 at which a line -lambda + u h_norm reaches zero
  for (const auto& f : detail::base_families(model.with_flux(0.0))) {
    if (f.sign > 0) continue;
    for (std::int64_t k = 0; k < 64; ++k) {
      if (f.multiplicity(k) == 0) continue;
      const double u = static_cast<double>(f.offset + f.step * k) / h_norm;
      if (!rep.first_kernel_u || u < *rep.first_kernel_u) rep.first_kernel_u = u;
      break;
    }
  }

  for (double u : u_grid) {
    const SpectralModel m = model.with_flux(u * h_norm);
    PscRow row;
    row.u = u;
    const auto prog = progression_spectrum(m);
    row.min_abs_eigenvalue = detail::min_abs_level(prog);
    row.kernel_dim = eta_hurwitz(prog, opt.zero_tol).kernel_dim;
    if (row.kernel_dim != 0 || row.min_abs_eigenvalue <= opt.zero_tol)
      throw InvariantViolation("psc_stability_sweep: kernel found at u = " + std::to_string(u) +
                               " below u0 = " + std::to_string(rep.threshold.u0));
    row.sf = u == 0.0 ? 0 : sf_affine(affine_path_from_model(m)).flow;
    const RhoValue rv = rho(m, opt);
    row.rho = rv.rho;
    row.rho_error_bound = rv.error_bound();
    rep.total_sf += row.sf;
    rep.rows.push_back(row);
  }
  for (const auto& row : rep.rows)
    rep.rho_max_deviation = std::max(rep.rho_max_deviation, std::abs(row.rho - rep.rows.front().rho));
  return rep;
}

}  // namespace twisted_dirac
