#include <gtest/gtest.h>

#include "twisted_dirac/weitzenbock.hpp"

using namespace twisted_dirac;

TEST(WeitzenbockAlgebraic, VolumeFluxInDimensionThreeByHand) {
  // c(H) = t, and each c(iota_j H) squares to -t^2: the left side is -2 t^2
  const GammaRep rep(3);
  for (double t : {0.4, -1.7}) {
    const auto s = weitzenbock_sides(rep, FluxForm({FormComponent::volume(3, t)}));
    EXPECT_LT((s.lhs + 2.0 * t * t * rep.identity()).norm(), 1e-13);
    EXPECT_LT((s.lhs - s.rhs).norm(), 1e-13);
  }
}

TEST(WeitzenbockAlgebraic, HoldsForRandomMixedDegreeForms) {
  for (int n : {3, 5, 7}) {
    const GammaRep rep(n);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      std::vector<FormComponent> parts;
      for (int d = 1; d <= n; d += 2) parts.push_back(FormComponent::random(n, d, 1000 * n + 10 * seed + d));
      const FluxForm h(parts);
      const auto s = weitzenbock_sides(rep, h);
      EXPECT_LE((s.lhs - s.rhs).norm(), 1e-12 * std::max(1.0, s.lhs.norm())) << "n=" << n << " seed " << seed;
    }
  }
}

TEST(WeitzenbockAlgebraic, RejectsFormsBeyondTheDimension) {
  EXPECT_THROW(lw_check_general(GammaRep(3), FluxForm({FormComponent::random(5, 3, 1)})), InvalidInput);
}

TEST(WeitzenbockTorus, ConstantAndVariableFluxResidualsVanish) {
  const SpectralModel torus{Torus3{{1.0, 1.3, 0.9}}, TorusHolonomy{{0.2, 0.0, 0.1}}, 0.3};
  const TorusFlux fluxes[] = {TorusFlux{}, TorusFlux::cosine(2, 0.4),
                              TorusFlux({{Mode{1, 1, 0}, Complex(0.1, 0.2)}, {Mode{-1, -1, 0}, Complex(0.1, -0.2)}})};
  for (const auto& f : fluxes) {
    const LwReport r = lw_check_deg3(torus, f, 4);
    EXPECT_GT(r.modes_compared, 0);
    EXPECT_LE(r.residual_deg3, 1e-12 * std::max(1.0, r.operator_scale));
    EXPECT_LE(r.residual_general, 1e-12 * std::max(1.0, r.operator_scale));
  }
}

TEST(WeitzenbockTorus, RequiresRoomForTheFluxBandwidth) {
  const SpectralModel torus{Torus3{}, TrivialBundle{1}, 0.0};
  const TorusFlux f({{Mode{2, 0, 0}, Complex(0.1)}, {Mode{-2, 0, 0}, Complex(0.1)}});
  EXPECT_THROW(lw_check_deg3(torus, f, 3), InvalidInput);
  EXPECT_NO_THROW(lw_check_deg3(torus, f, 4));
}

TEST(PscThreshold, ClosedForm) {
  const PscThreshold th = psc_threshold(6.0, 1.0);
  EXPECT_NEAR(th.u0, std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_NEAR(psc_threshold(6.0, 2.0).u0, th.u0 / 2.0, 1e-15);
  // R/4 - 2 u^2 |H|^2 vanishes at u0
  EXPECT_NEAR(6.0 / 4.0 - 2.0 * th.u0 * th.u0, 0.0, 1e-14);
  EXPECT_THROW(psc_threshold(0.0, 1.0), InvalidInput);
  EXPECT_THROW(psc_threshold(6.0, -1.0), InvalidInput);
}

TEST(PscSweep, RhoIsConstantBelowThreshold) {
  const std::vector<double> grid{0.0, 0.3, 0.6, 0.85};
  const PscReport r = psc_stability_sweep({Lens{3, 1.0}, LensCharacter{3, 1}, 0.0}, 1.0, grid, EngineOptions{});
  ASSERT_EQ(r.rows.size(), grid.size());
  EXPECT_EQ(r.total_sf, 0);
  EXPECT_LE(r.rho_max_deviation, 1e-12);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.kernel_dim, 0);
    EXPECT_GT(row.min_abs_eigenvalue, 0.5);
  }
  ASSERT_TRUE(r.first_kernel_u.has_value());
  EXPECT_GE(*r.first_kernel_u, r.threshold.u0);
}

TEST(PscSweep, FirstKernelOnTheSphere) {
  const PscReport r = psc_stability_sweep({Sphere3{1.0}, TrivialBundle{1}, 0.0}, 1.0, {0.0}, EngineOptions{});
  ASSERT_TRUE(r.first_kernel_u.has_value());
  EXPECT_NEAR(*r.first_kernel_u, 1.5, 1e-15);
}

TEST(PscSweep, RejectsFlatModelsAndGridsPastThreshold) {
  EXPECT_THROW(psc_stability_sweep({Torus3{}, TrivialBundle{1}, 0.0}, 1.0, {0.0}, EngineOptions{}), InvalidInput);
  EXPECT_THROW(psc_stability_sweep({Sphere3{1.0}, TrivialBundle{1}, 0.0}, 1.0, {0.0, 0.9}, EngineOptions{}),
               InvalidInput);
  EXPECT_THROW(psc_stability_sweep({Sphere3{1.0}, TrivialBundle{1}, 0.0}, 1.0, {}, EngineOptions{}), InvalidInput);
}
