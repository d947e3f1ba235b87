#pragma once

// Closed-form spectra of the twisted Dirac operator D + t on model spin
// manifolds with flat hermitian bundles. The flux is a constant multiple t of
// the Riemannian volume form; with the Clifford convention of clifford.hpp its
// action is t * I, so every eigenvalue moves by +t.
//
// Models:
//   Circle(r), holonomy a          lambda_n = (n + a)/r, n in Z, mult 1
//   Sphere3(r)                     +-(3/2 + k)/r, mult (k+1)(k+2)
//   Torus3(L, delta), holonomy th  +-2 pi |w|, w_j = (v_j + delta_j + th_j)/L_j,
//                                  one eigenvalue of each sign per v in Z^3
//   Lens(p, r) = S^3 / Z_p         S^3 spectrum restricted by character sums
//
// Lens spaces: Z_p acts on S^3 = SU(2) by left multiplication with
// diag(z, z^-1), z = exp(2 pi i / p). With left-invariant trivialization of
// the spinor bundle the eigenspace of +(3/2 + k) is V_{k/2} (x) C^{k+2} and
// that of -(3/2 + k) is V_{(k+1)/2} (x) C^{k+1}, where Z_p acts on the spin-j
// irrep V_j only. Sections twisted by the character g -> z^c count the copies
// of that character inside V_j.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "twisted_dirac/error.hpp"
#include "twisted_dirac/polynomial.hpp"

namespace twisted_dirac {

using Vec3 = std::array<double, 3>;

struct Circle {
  double radius = 1.0;
  friend bool operator==(const Circle&, const Circle&) = default;
};
struct Sphere3 {
  double radius = 1.0;
  friend bool operator==(const Sphere3&, const Sphere3&) = default;
};
struct Torus3 {
  Vec3 lengths{1.0, 1.0, 1.0};
  Vec3 spin_structure{0.5, 0.5, 0.5};  // each entry 0 or 1/2
  friend bool operator==(const Torus3&, const Torus3&) = default;
};
struct Lens {
  int p = 2;
  double radius = 1.0;
  friend bool operator==(const Lens&, const Lens&) = default;
};
using Geometry = std::variant<Circle, Sphere3, Torus3, Lens>;

struct TrivialBundle {
  int rank = 1;
  friend bool operator==(const TrivialBundle&, const TrivialBundle&) = default;
};
struct CircleHolonomy {
  double a = 0.0;  // in [0, 1)
  friend bool operator==(const CircleHolonomy&, const CircleHolonomy&) = default;
};
struct TorusHolonomy {
  Vec3 theta{0.0, 0.0, 0.0};  // in [0, 1)^3
  friend bool operator==(const TorusHolonomy&, const TorusHolonomy&) = default;
};
struct LensCharacter {
  int p = 2;
  int k = 0;  // taken mod p
  friend bool operator==(const LensCharacter&, const LensCharacter&) = default;
};
using FlatCharacter = std::variant<TrivialBundle, CircleHolonomy, TorusHolonomy, LensCharacter>;

struct EigenItem {
  double value = 0.0;
  std::int64_t multiplicity = 1;
  friend bool operator==(const EigenItem&, const EigenItem&) = default;
};

/// Eigenvalues sorted ascending with exact multiplicities. Every eigenvalue
/// with |lambda| < complete_below is present (shell-complete truncation).
struct Spectrum {
  std::vector<EigenItem> items;
  double complete_below = 0.0;

  std::int64_t total_multiplicity() const {
    std::int64_t n = 0;
    for (const auto& e : items) n += e.multiplicity;
    return n;
  }
};

inline std::string geometry_name(const Geometry& g) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Circle>) return "circle";
        else if constexpr (std::is_same_v<T, Sphere3>) return "sphere3";
        else if constexpr (std::is_same_v<T, Torus3>) return "torus3";
        else return "lens";
      },
      g);
}

struct SpectralModel {
  Geometry geometry = Sphere3{};
  FlatCharacter bundle = TrivialBundle{};
  double flux_shift = 0.0;

  friend bool operator==(const SpectralModel&, const SpectralModel&) = default;

  int dimension() const { return std::holds_alternative<Circle>(geometry) ? 1 : 3; }

  int rank() const {
    if (const auto* t = std::get_if<TrivialBundle>(&bundle)) return t->rank;
    return 1;
  }

  bool is_trivial_bundle() const { return std::holds_alternative<TrivialBundle>(bundle); }

  /// Same geometry and flux, trivial bundle of the same rank.
  SpectralModel trivial_counterpart() const { return {geometry, TrivialBundle{rank()}, flux_shift}; }

  SpectralModel with_flux(double t) const { return {geometry, bundle, t}; }

  double volume() const {
    constexpr double pi = std::numbers::pi;
    return std::visit(
        [](const auto& g) -> double {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Circle>) return 2.0 * pi * g.radius;
          else if constexpr (std::is_same_v<T, Sphere3>) return 2.0 * pi * pi * std::pow(g.radius, 3);
          else if constexpr (std::is_same_v<T, Torus3>) return g.lengths[0] * g.lengths[1] * g.lengths[2];
          else return 2.0 * pi * pi * std::pow(g.radius, 3) / g.p;
        },
        geometry);
  }

  /// Length of the shortest closed geodesic.
  double shortest_closed_geodesic() const {
    constexpr double pi = std::numbers::pi;
    return std::visit(
        [](const auto& g) -> double {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Circle> || std::is_same_v<T, Sphere3>) return 2.0 * pi * g.radius;
          else if constexpr (std::is_same_v<T, Torus3>) return std::min({g.lengths[0], g.lengths[1], g.lengths[2]});
          else return 2.0 * pi * g.radius / g.p;
        },
        geometry);
  }

  /// Scalar curvature of the model metric (constant on every model).
  double scalar_curvature() const {
    return std::visit(
        [](const auto& g) -> double {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Sphere3> || std::is_same_v<T, Lens>)
            return 6.0 / (g.radius * g.radius);
          else return 0.0;
        },
        geometry);
  }

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be positive");
    };
    auto unit_interval = [](double v, const char* what) {
      if (!(v >= 0.0 && v < 1.0)) throw InvalidInput(std::string(what) + " must lie in [0, 1)");
    };
    if (!std::isfinite(flux_shift)) throw InvalidInput("flux must be finite");
    std::visit(
        [&](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Circle> || std::is_same_v<T, Sphere3>) {
            positive(g.radius, "radius");
          } else if constexpr (std::is_same_v<T, Torus3>) {
            for (double l : g.lengths) positive(l, "torus edge length");
            for (double d : g.spin_structure)
              if (d != 0.0 && d != 0.5) throw InvalidInput("torus spin structure entries must be 0 or 1/2");
          } else {
            positive(g.radius, "radius");
            if (g.p < 2) throw InvalidInput("lens order p must be >= 2");
          }
        },
        geometry);
    std::visit(
        [&](const auto& b) {
          using B = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<B, TrivialBundle>) {
            if (b.rank < 1) throw InvalidInput("bundle rank must be positive");
          } else if constexpr (std::is_same_v<B, CircleHolonomy>) {
            unit_interval(b.a, "circle holonomy");
            if (!std::holds_alternative<Circle>(geometry))
              throw InvalidInput("circle holonomy requires circle geometry");
          } else if constexpr (std::is_same_v<B, TorusHolonomy>) {
            for (double th : b.theta) unit_interval(th, "torus holonomy");
            if (!std::holds_alternative<Torus3>(geometry))
              throw InvalidInput("torus holonomy requires torus3 geometry");
          } else {
            const auto* lens = std::get_if<Lens>(&geometry);
            if (!lens) throw InvalidInput("lens character requires lens geometry");
            if (b.p != lens->p) throw InvalidInput("lens character order differs from lens order");
          }
        },
        bundle);
  }
};

// ---------------------------------------------------------------------------
// Lens space multiplicities.

/// Number of copies of the character z^c of Z_p inside the SU(2) irrep with
/// highest weight two_j / 2, by the character inner product
///   (1/p) sum_l conj(z^{lc}) sum_{e} z^{le},  e = -two_j, -two_j + 2, ..., two_j.
inline std::int64_t lens_character_count(int p, int c, int two_j) {
  if (p < 1) throw InvalidInput("lens_character_count: p must be positive");
  if (two_j < 0) return 0;
  using LC = std::complex<long double>;
  const long double w = 2.0L * std::numbers::pi_v<long double> / p;
  LC total = 0.0L;
  for (int l = 0; l < p; ++l) {
    LC chi = 0.0L;
    for (int e = -two_j; e <= two_j; e += 2)
      chi += std::polar(1.0L, w * static_cast<long double>((static_cast<long long>(l) * e) % p));
    total += std::polar(1.0L, -w * static_cast<long double>((static_cast<long long>(l) * c) % p)) * chi;
  }
  const long double count = total.real() / p;
  const long double rounded = std::round(count);
  if (std::abs(count - rounded) > 1e-6L || std::abs(total.imag() / p) > 1e-6L)
    throw InvariantViolation("lens_character_count: character sum is not an integer");
  return static_cast<std::int64_t>(rounded);
}

namespace detail {

// Unshifted base families sign * (offset + step * k), k >= 0, with
// multiplicity polynomial in k. Families may start at zero (kernel).
struct BaseFamily {
  int sign;
  long double offset;
  long double step;
  MultiplicityPolynomial multiplicity;
};

inline int lens_character_index(const SpectralModel& m) {
  if (const auto* ch = std::get_if<LensCharacter>(&m.bundle)) return ((ch->k % ch->p) + ch->p) % ch->p;
  return 0;
}

// Multiplicity of the S^3/Z_p level k for the given sign.
inline std::int64_t lens_level_multiplicity(int p, int c, std::int64_t k, int sign) {
  if (sign > 0) return (k + 2) * lens_character_count(p, c, static_cast<int>(k));
  return (k + 1) * lens_character_count(p, c, static_cast<int>(k + 1));
}

inline std::vector<BaseFamily> base_families(const SpectralModel& m) {
  const std::int64_t rank = m.rank();
  std::vector<BaseFamily> out;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Circle>) {
          long double a = 0.0L;
          if (const auto* h = std::get_if<CircleHolonomy>(&m.bundle)) a = h->a;
          const long double r = g.radius;
          const std::int64_t one[] = {rank};
          const auto mult = MultiplicityPolynomial::from_monomials(one);
          out.push_back({+1, a / r, 1.0L / r, mult});
          out.push_back({-1, (1.0L - a) / r, 1.0L / r, mult});
        } else if constexpr (std::is_same_v<T, Sphere3>) {
          const std::int64_t coeffs[] = {2 * rank, 3 * rank, rank};  // (k+1)(k+2)
          const auto mult = MultiplicityPolynomial::from_monomials(coeffs);
          const long double r = g.radius;
          out.push_back({+1, 1.5L / r, 1.0L / r, mult});
          out.push_back({-1, 1.5L / r, 1.0L / r, mult});
        } else if constexpr (std::is_same_v<T, Lens>) {
          // The character count is quasi-polynomial in k with period dividing
          // 2p; on each residue class it is linear, so the level multiplicity
          // is a polynomial of degree <= 2 in the class index q.
          const int period = 2 * g.p;
          const int c = lens_character_index(m);
          const long double r = g.radius;
          for (int sign : {+1, -1}) {
            for (int residue = 0; residue < period; ++residue) {
              std::vector<std::int64_t> samples;
              for (int q = 0; q < 8; ++q)
                samples.push_back(rank * lens_level_multiplicity(g.p, c, std::int64_t{period} * q + residue, sign));
              auto mult = MultiplicityPolynomial::from_samples(samples, 2);
              if (mult.is_zero()) continue;
              out.push_back({sign, (1.5L + residue) / r, static_cast<long double>(period) / r, mult});
            }
          }
        } else {
          throw Unsupported("torus spectra are not arithmetic progressions");
        }
      },
      m.geometry);
  return out;
}

inline void sort_and_merge(std::vector<EigenItem>& items, double rel_tol) {
  std::sort(items.begin(), items.end(), [](const EigenItem& a, const EigenItem& b) { return a.value < b.value; });
  std::vector<EigenItem> merged;
  for (const auto& e : items) {
    if (e.multiplicity == 0) continue;
    if (!merged.empty() &&
        std::abs(merged.back().value - e.value) <= rel_tol * std::max(1.0, std::abs(e.value))) {
      merged.back().multiplicity += e.multiplicity;
    } else {
      merged.push_back(e);
    }
  }
  items = std::move(merged);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Enumeration.

/// Cutoff semantics: circle |n| <= cutoff; sphere/lens levels k <= cutoff;
/// torus all lattice vectors with |w| <= cutoff / max(L).
inline Spectrum enumerate_spectrum(const SpectralModel& model, int cutoff) {
  model.validate();
  if (cutoff < 1) throw InvalidInput("enumerate_spectrum: cutoff must be >= 1");
  const double t = model.flux_shift;
  Spectrum s;
  const std::int64_t rank = model.rank();

  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Circle>) {
          double a = 0.0;
          if (const auto* h = std::get_if<CircleHolonomy>(&model.bundle)) a = h->a;
          for (int n = -cutoff; n <= cutoff; ++n) s.items.push_back({(n + a) / g.radius + t, rank});
          s.complete_below = std::min(std::abs((cutoff + 1 + a) / g.radius + t),
                                      std::abs((-cutoff - 1 + a) / g.radius + t));
        } else if constexpr (std::is_same_v<T, Sphere3> || std::is_same_v<T, Lens>) {
          int p = 1, c = 0;
          if constexpr (std::is_same_v<T, Lens>) {
            p = g.p;
            c = detail::lens_character_index(model);
          }
          for (std::int64_t k = 0; k <= cutoff; ++k) {
            const double level = (1.5 + static_cast<double>(k)) / g.radius;
            for (int sign : {+1, -1}) {
              const std::int64_t mult = p == 1 ? (k + 1) * (k + 2) : detail::lens_level_multiplicity(p, c, k, sign);
              if (mult > 0) s.items.push_back({sign * level + t, rank * mult});
            }
          }
          s.complete_below = (2.5 + cutoff) / g.radius - std::abs(t);
        } else {
          Vec3 offset = g.spin_structure;
          if (const auto* h = std::get_if<TorusHolonomy>(&model.bundle))
            for (int j = 0; j < 3; ++j) offset[j] += h->theta[j];
          const double lmax = std::max({g.lengths[0], g.lengths[1], g.lengths[2]});
          const double wmax = cutoff / lmax;
          const double two_pi = 2.0 * std::numbers::pi;
          std::array<int, 3> lo{}, hi{};
          for (int j = 0; j < 3; ++j) {
            lo[j] = static_cast<int>(std::floor(-wmax * g.lengths[j] - offset[j])) - 1;
            hi[j] = static_cast<int>(std::ceil(wmax * g.lengths[j] - offset[j])) + 1;
          }
          for (int v0 = lo[0]; v0 <= hi[0]; ++v0)
            for (int v1 = lo[1]; v1 <= hi[1]; ++v1)
              for (int v2 = lo[2]; v2 <= hi[2]; ++v2) {
                const double w0 = (v0 + offset[0]) / g.lengths[0];
                const double w1 = (v1 + offset[1]) / g.lengths[1];
                const double w2 = (v2 + offset[2]) / g.lengths[2];
                const double norm = std::sqrt(w0 * w0 + w1 * w1 + w2 * w2);
                if (norm > wmax * (1.0 + 1e-13)) continue;
                s.items.push_back({two_pi * norm + t, rank});
                s.items.push_back({-two_pi * norm + t, rank});
              }
          s.complete_below = two_pi * wmax - std::abs(t);
        }
      },
      model.geometry);

  detail::sort_and_merge(s.items, 1e-12);
  return s;
}

// ---------------------------------------------------------------------------
// Kernel.

inline constexpr double kDefaultZeroTol = 1e-9;

/// Number of eigenvalues with |lambda| <= zero_tol. An eigenvalue in the
/// ambiguous band (zero_tol/2, 2 zero_tol] raises ResolutionFailure.
inline std::int64_t kernel_dimension(const Spectrum& s, double zero_tol = kDefaultZeroTol) {
  if (!(zero_tol > 0.0)) throw InvalidInput("kernel_dimension: zero_tol must be positive");
  if (s.complete_below <= 2.0 * zero_tol)
    throw InvalidInput("kernel_dimension: cutoff does not resolve the neighbourhood of zero");
  std::int64_t count = 0;
  for (const auto& e : s.items) {
    const double a = std::abs(e.value);
    if (a > 0.5 * zero_tol && a <= 2.0 * zero_tol)
      throw ResolutionFailure("kernel_dimension: eigenvalue " + std::to_string(e.value) +
                                  " too close to the zero tolerance",
                              -2.0 * zero_tol, 2.0 * zero_tol);
    if (a <= zero_tol) count += e.multiplicity;
  }
  return count;
}

inline std::int64_t kernel_dimension(const SpectralModel& model, int cutoff, double zero_tol = kDefaultZeroTol) {
  return kernel_dimension(enumerate_spectrum(model, cutoff), zero_tol);
}

// ---------------------------------------------------------------------------
// Arithmetic-progression form of the spectrum (input to the Hurwitz engine).

/// Family {sign * (offset + step * k) : k >= 0} with multiplicity m(k);
/// offset > 0, step > 0.
struct Progression {
  int sign = 1;
  long double offset = 1.0L;
  long double step = 1.0L;
  MultiplicityPolynomial multiplicity;
};

/// Full spectrum = families + finitely many extra eigenvalues (which may
/// include zero).
struct ProgressionSpectrum {
  std::vector<Progression> families;
  std::vector<EigenItem> finite;
};

/// Exact progression decomposition of the shifted model spectrum. Levels that
/// change sign (or hit zero) under the shift are peeled off into `finite`.
inline ProgressionSpectrum progression_spectrum(const SpectralModel& model) {
  model.validate();
  const long double t = model.flux_shift;
  ProgressionSpectrum out;
  for (const auto& f : detail::base_families(model)) {
    std::int64_t k0 = 0;
    for (;; ++k0) {
      const long double magnitude = f.offset + f.step * static_cast<long double>(k0) + f.sign * t;
      if (magnitude > 0.0L) break;
      const std::int64_t mult = f.multiplicity(k0);
      if (mult > 0) out.finite.push_back({static_cast<double>(f.sign * magnitude), mult});
      if (k0 > 100000000) throw InvalidInput("progression_spectrum: shift too large");
    }
    const long double magnitude = f.offset + f.step * static_cast<long double>(k0) + f.sign * t;
    out.families.push_back({f.sign, magnitude, f.step, f.multiplicity.shifted(k0)});
  }
  detail::sort_and_merge(out.finite, 0.0);
  return out;
}

}  // namespace twisted_dirac
