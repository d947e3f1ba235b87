#include <gtest/gtest.h>

#include "oracles.hpp"
#include "twisted_dirac/eta.hpp"

using namespace twisted_dirac;

namespace {

EngineOptions heat_options(int cutoff) {
  EngineOptions o;
  o.method = EtaMethod::heat_kernel;
  o.cutoff = cutoff;
  return o;
}

const EngineOptions kHurwitz{};

}  // namespace

TEST(SpecialFunctions, BernoulliPolynomialsLowDegree) {
  for (long double x : {0.0L, 0.3L, 1.0L, 2.5L}) {
    EXPECT_NEAR(static_cast<double>(bernoulli_polynomial(1, x)), static_cast<double>(x - 0.5L), 1e-15);
    EXPECT_NEAR(static_cast<double>(bernoulli_polynomial(2, x)), static_cast<double>(x * x - x + 1.0L / 6), 1e-15);
    EXPECT_NEAR(static_cast<double>(bernoulli_polynomial(3, x)),
                static_cast<double>(x * x * x - 1.5L * x * x + 0.5L * x), 1e-14);
  }
}

TEST(SpecialFunctions, HurwitzZetaAtNonpositiveIntegers) {
  // frozen values: zeta(0, x) = 1/2 - x, zeta(-1, 1) = -1/12, zeta(-2, 1) = 0, zeta(-3, 1) = 1/120
  EXPECT_NEAR(static_cast<double>(hurwitz_zeta_nonpositive(0, 0.3L)), 0.2, 1e-15);
  EXPECT_NEAR(static_cast<double>(hurwitz_zeta_nonpositive(1, 1.0L)), -1.0 / 12, 1e-15);
  EXPECT_NEAR(static_cast<double>(hurwitz_zeta_nonpositive(2, 1.0L)), 0.0, 1e-15);
  EXPECT_NEAR(static_cast<double>(hurwitz_zeta_nonpositive(3, 1.0L)), 1.0 / 120, 1e-15);
  // shift relation zeta(-n, x) - zeta(-n, x + 1) = x^n
  for (int n = 0; n <= 4; ++n)
    EXPECT_NEAR(static_cast<double>(hurwitz_zeta_nonpositive(n, 0.7L) - hurwitz_zeta_nonpositive(n, 1.7L)),
                std::pow(0.7, n), 1e-14);
}

TEST(EtaHurwitz, CircleMatchesAbelSummation) {
  for (double a : {0.1, 0.35, 0.5, 0.8}) {
    const EtaValue e = compute_eta({Circle{1.0}, CircleHolonomy{a}, 0.0}, kHurwitz);
    EXPECT_NEAR(e.eta, oracle::circle_eta_abel(a), 1e-8) << "a = " << a;
    EXPECT_EQ(e.kernel_dim, 0);
  }
}

TEST(EtaHurwitz, CircleWithKernelCountsZeroModeInXi) {
  const EtaValue e = compute_eta({Circle{1.0}, CircleHolonomy{0.0}, 0.0}, kHurwitz);
  EXPECT_EQ(e.kernel_dim, 1);
  EXPECT_NEAR(e.eta, 0.0, 1e-14);
  EXPECT_NEAR(e.xi, 0.5, 1e-14);
}

TEST(EtaHurwitz, SphereClosedForm) {
  for (double t = -1.45; t < 1.5; t += 0.1) {
    const EtaValue e = compute_eta({Sphere3{1.0}, TrivialBundle{1}, t}, kHurwitz);
    EXPECT_NEAR(e.eta, oracle::sphere_eta(t), 1e-12) << "t = " << t;
    EXPECT_LE(e.error_bound, 1e-12);
  }
}

TEST(EtaHurwitz, LensFrozenValues) {
  EXPECT_NEAR(compute_eta({Lens{3, 1.0}, LensCharacter{3, 0}, 0.0}, kHurwitz).eta, oracle::lens3_eta(0), 1e-12);
  EXPECT_NEAR(compute_eta({Lens{3, 1.0}, LensCharacter{3, 1}, 0.0}, kHurwitz).eta, oracle::lens3_eta(1), 1e-12);
  EXPECT_NEAR(rho({Lens{3, 1.0}, LensCharacter{3, 1}, 0.0}, kHurwitz).rho, oracle::lens3_rho_k1, 1e-12);
}

TEST(EtaHurwitz, ResidueIsStructurallyAbsent) {
  const SpectralModel models[] = {{Sphere3{1.0}, TrivialBundle{1}, 0.7}, {Lens{5, 2.0}, LensCharacter{5, 2}, -0.3}};
  for (const auto& m : models) EXPECT_EQ(compute_eta(m, kHurwitz).pole_residue, 0.0);
}

// Properties.

TEST(EtaProperties, ReversingTheOperatorNegatesEta) {
  for (double t : {0.05, 0.6, 1.9, 2.7}) {
    const double plus = compute_eta({Sphere3{1.0}, TrivialBundle{1}, t}, kHurwitz).eta;
    const double minus = compute_eta({Sphere3{1.0}, TrivialBundle{1}, -t}, kHurwitz).eta;
    EXPECT_NEAR(plus, -minus, 1e-12) << "t = " << t;
  }
  for (double a : {0.15, 0.4}) {
    const double e1 = compute_eta({Circle{1.0}, CircleHolonomy{a}, 0.0}, kHurwitz).eta;
    const double e2 = compute_eta({Circle{1.0}, CircleHolonomy{1.0 - a}, 0.0}, kHurwitz).eta;
    EXPECT_NEAR(e1, -e2, 1e-13);
  }
}

TEST(EtaProperties, InvariantUnderOverallScaling) {
  for (double r : {0.5, 2.0, 3.7}) {
    const double base = compute_eta({Lens{4, 1.0}, LensCharacter{4, 1}, 0.45}, kHurwitz).eta;
    const double scaled = compute_eta({Lens{4, r}, LensCharacter{4, 1}, 0.45 / r}, kHurwitz).eta;
    EXPECT_NEAR(base, scaled, 1e-11) << "r = " << r;
  }
}

TEST(EtaProperties, AdditiveInTheBundleRank) {
  for (double t : {0.2, 1.1}) {
    const double one = compute_eta({Sphere3{1.0}, TrivialBundle{1}, t}, kHurwitz).eta;
    const double three = compute_eta({Sphere3{1.0}, TrivialBundle{3}, t}, kHurwitz).eta;
    EXPECT_NEAR(three, 3.0 * one, 1e-12);
  }
}

TEST(EtaProperties, CharacterSumReproducesTheSphere) {
  // eta on S^3 equals the sum over the characters of Z_p of the lens etas
  for (double t : {0.0, 0.3}) {
    double sum = 0.0;
    for (int k = 0; k < 5; ++k) sum += compute_eta({Lens{5, 1.0}, LensCharacter{5, k}, t}, kHurwitz).eta;
    EXPECT_NEAR(sum, compute_eta({Sphere3{1.0}, TrivialBundle{1}, t}, kHurwitz).eta, 1e-11);
  }
}

// Heat-kernel engine.

TEST(EtaHeat, SymmetricSpectrumGivesExactZero) {
  const EtaValue e = compute_eta({Sphere3{1.0}, TrivialBundle{1}, 0.0}, heat_options(50));
  EXPECT_EQ(e.eta, 0.0);
  EXPECT_TRUE(e.converged);
}

TEST(EtaHeat, AgreesWithHurwitzWithinErrorBounds) {
  const SpectralModel models[] = {{Sphere3{1.0}, TrivialBundle{1}, 0.35},
                                  {Sphere3{1.0}, TrivialBundle{1}, -1.3},
                                  {Lens{3, 1.0}, LensCharacter{3, 1}, 0.0},
                                  {Lens{3, 1.0}, LensCharacter{3, 2}, 0.2}};
  for (const auto& m : models) {
    const EtaValue h = compute_eta(m, kHurwitz);
    const EtaValue k = compute_eta(m, heat_options(400));
    EXPECT_TRUE(k.converged) << geometry_name(m.geometry) << " err " << k.error_bound;
    EXPECT_LE(std::abs(h.eta - k.eta), h.error_bound + k.error_bound)
        << geometry_name(m.geometry) << " t=" << m.flux_shift << " gap " << std::abs(h.eta - k.eta);
    EXPECT_LE(k.error_bound, 1e-6);
  }
}

TEST(EtaHeat, CircleHolonomyClosedForm) {
  const EtaValue e = compute_eta({Circle{1.0}, CircleHolonomy{0.3}, 0.0}, heat_options(2000));
  EXPECT_NEAR(e.eta, 0.4, 1e-6);
  EXPECT_LE(std::abs(e.eta - 0.4), e.error_bound + 1e-15);
}

TEST(EtaHeat, TorusSmallFluxMatchesCubicLaw) {
  const SpectralModel m{Torus3{{1.0, 1.0, 1.0}}, TrivialBundle{1}, 0.5};
  const EtaValue e = compute_eta(m, heat_options(48));
  const double expected = oracle::torus_eta_small_flux(m.volume(), 0.5);
  EXPECT_TRUE(e.converged) << "err " << e.error_bound;
  EXPECT_NEAR(e.eta, expected, std::max(e.error_bound, 1e-9));
}

TEST(EtaHeat, RejectsTruncationThatDoesNotReachTheSpectrum) {
  Spectrum s;
  s.items = {{1.0, 1}, {2.0, 1}};
  s.complete_below = 0.5;
  EXPECT_THROW(eta_heat(s), InvalidInput);
}

// rho and truncation stability.

TEST(Rho, RejectsMismatchedReference) {
  const SpectralModel lens{Lens{3, 1.0}, LensCharacter{3, 1}, 0.1};
  EXPECT_THROW(rho(lens, {Lens{3, 2.0}, TrivialBundle{1}, 0.1}, kHurwitz), InvalidInput);
  EXPECT_THROW(rho(lens, {Lens{3, 1.0}, TrivialBundle{1}, 0.2}, kHurwitz), InvalidInput);
  EXPECT_THROW(rho(lens, {Lens{3, 1.0}, LensCharacter{3, 0}, 0.1}, kHurwitz), InvalidInput);
}

TEST(Rho, TrivialBundleHasZeroRho) {
  for (int rank : {1, 2, 4})
    EXPECT_NEAR(rho({Sphere3{1.0}, TrivialBundle{rank}, 0.6}, kHurwitz).rho, 0.0, 1e-12);
}

TEST(Rho, StabilityTableShrinksOnTheLens) {
  const int cutoffs[] = {50, 100, 200};
  const auto rows = rho_difference_stability({Lens{3, 1.0}, LensCharacter{3, 1}, 0.0}, cutoffs, heat_options(0));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows.front().delta, 0.0);
  EXPECT_TRUE(deltas_monotone(rows));
  EXPECT_LE(rows.back().delta, 1e-6);
  EXPECT_NEAR(rows.back().rho, oracle::lens3_rho_k1, 1e-6);
}

TEST(Rho, StabilityRejectsBadCutoffLists) {
  const int two[] = {10, 20};
  const int unsorted[] = {10, 30, 20};
  const SpectralModel m{Sphere3{1.0}, TrivialBundle{1}, 0.1};
  EXPECT_THROW(rho_difference_stability(m, two, kHurwitz), InvalidInput);
  EXPECT_THROW(rho_difference_stability(m, unsorted, kHurwitz), InvalidInput);
}

TEST(Rho, MonotonicityDetectsGrowingDeltas) {
  const std::vector<StabilityRow> rows{{10, 0.0, 0.0, 0.0}, {20, 1e-3, 1e-3, 0.0}, {40, 1.1e-2, 1e-2, 0.0}};
  EXPECT_FALSE(deltas_monotone(rows));
}
