#pragma once

// Constant conformal rescaling of the pair (g, H).
//
// Metric g -> e^{2u} g, so lengths scale by e^u. The flux component of degree
// 2j + 1 is multiplied by e^{-(2j+2)u}. Measured against the rescaled
// orthonormal frame, a top-degree coefficient picks up e^{n u}, so on an
// n-dimensional model with top-degree flux the operator (and every
// eigenvalue) scales by e^{-u}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <type_traits>
#include <variant>
#include <vector>

#include "twisted_dirac/clifford.hpp"
#include "twisted_dirac/error.hpp"
#include "twisted_dirac/eta.hpp"
#include "twisted_dirac/spectral_models.hpp"

namespace twisted_dirac {

struct ConformalScale {
  double u = 0.0;

  explicit ConformalScale(double log_factor) : u(log_factor) {
    if (!std::isfinite(u)) throw InvalidInput("ConformalScale: u must be finite");
  }

  /// Coefficient factor for a flux component of the given odd degree.
  double flux_factor(int degree) const {
    if (degree < 1 || degree % 2 == 0) throw InvalidInput("ConformalScale: flux degrees are odd and positive");
    const int j = (degree - 1) / 2;
    return std::exp(-(2.0 * j + 2.0) * u);
  }

  double length_factor() const { return std::exp(u); }
};

inline FluxForm transform_flux(const FluxForm& h, const ConformalScale& scale) {
  std::vector<FormComponent> out;
  out.reserve(h.components().size());
  for (const auto& c : h.components()) out.push_back(c.scaled(scale.flux_factor(c.degree())));
  return FluxForm(std::move(out));
}

/// Model with lengths scaled by e^u and the top-degree flux coefficient
/// transformed and re-expressed in the new frame.
inline SpectralModel transform_spectrum(const SpectralModel& model, const ConformalScale& scale) {
  model.validate();
  const int n = model.dimension();
  const double flux = model.flux_shift * scale.flux_factor(n) * std::exp(n * scale.u);
  const double l = scale.length_factor();
  SpectralModel out = model;
  out.flux_shift = flux;
  std::visit(
      [&](auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Torus3>)
          for (double& x : g.lengths) x *= l;
        else
          g.radius *= l;
      },
      out.geometry);
  return out;
}

/// max over the common shell of |lambda_u - e^{-u} lambda_0| / max(1, |lambda_0|);
/// multiplicities must agree exactly.
inline double spectrum_scaling_deviation(const SpectralModel& model, const ConformalScale& scale, int cutoff) {
  const Spectrum a = enumerate_spectrum(model, cutoff);
  const Spectrum b = enumerate_spectrum(transform_spectrum(model, scale), cutoff);
  if (a.items.size() != b.items.size()) return std::numeric_limits<double>::infinity();
  const double f = std::exp(-scale.u);
  double dev = 0.0;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    if (a.items[i].multiplicity != b.items[i].multiplicity) return std::numeric_limits<double>::infinity();
    dev = std::max(dev, std::abs(b.items[i].value - f * a.items[i].value) / std::max(1.0, std::abs(a.items[i].value)));
  }
  return dev;
}

struct ConformalRow {
  double u = 0.0;
  double rho = 0.0;
  double deviation = 0.0;  // |rho(u) - rho(0)|
  double error_bound = 0.0;
};

struct ConformalReport {
  double rho_reference = 0.0;
  std::vector<ConformalRow> rows;
  double max_deviation = 0.0;
};

inline ConformalReport check_rho_conformal(const SpectralModel& model, std::span<const double> grid,
                                           const EngineOptions& opt) {
  ConformalReport r;
  const RhoValue base = rho(model, opt);
  r.rho_reference = base.rho;
  for (double u : grid) {
    const RhoValue v = rho(transform_spectrum(model, ConformalScale(u)), opt);
    ConformalRow row{u, v.rho, std::abs(v.rho - base.rho), v.error_bound() + base.error_bound()};
    r.max_deviation = std::max(r.max_deviation, row.deviation);
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace twisted_dirac
