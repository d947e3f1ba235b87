#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "twisted_dirac/spectral_flow.hpp"

using namespace twisted_dirac;

namespace {

CMatrix random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

std::int64_t negative_count(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  return (es.eigenvalues().array() < 0.0).count();
}

}  // namespace

TEST(SfAffine, CountsSignedCrossings) {
  const AffinePath p{{{-1.0, 2.0, 3}, {0.5, -1.0, 2}, {2.0, 1.0, 1}, {-0.2, 0.0, 5}}, 1.0};
  const SfResult r = sf_affine(p);
  EXPECT_EQ(r.flow, 3 - 2);
  ASSERT_EQ(r.crossings.size(), 2u);
  EXPECT_DOUBLE_EQ(r.crossings[0].u, 0.5);
  EXPECT_FALSE(r.convention_sensitive());
}

TEST(SfAffine, EndpointZeroCountsAsNonnegative) {
  // a line ending at zero from below has crossed; one starting at zero and rising has not
  const SfResult end = sf_affine({{{-1.0, 1.0, 1}}, 1.0});
  EXPECT_EQ(end.flow, 1);
  EXPECT_TRUE(end.endpoint_kernel.second);
  const SfResult start = sf_affine({{{0.0, 1.0, 1}}, 1.0});
  EXPECT_EQ(start.flow, 0);
  EXPECT_TRUE(start.convention_sensitive());
  const SfResult falling = sf_affine({{{0.0, -1.0, 1}}, 1.0});
  EXPECT_EQ(falling.flow, -1);
}

TEST(SfAffine, ReversalNegatesFlow) {
  for (double t : {-3.7, -1.2, 0.4, 1.6, 2.9, 5.1}) {
    const AffinePath p = affine_path_from_model({Sphere3{1.0}, TrivialBundle{1}, t});
    EXPECT_EQ(sf_affine(p).flow, -sf_affine(p.reversed()).flow) << "t = " << t;
  }
}

TEST(SfAffine, AdditiveUnderConcatenation) {
  const SpectralModel m{Lens{3, 1.0}, LensCharacter{3, 1}, 4.3};
  const AffinePath whole = affine_path_from_model(m);
  for (double split : {0.21, 0.5, 0.77}) {
    AffinePath first{{}, split}, second{{}, 1.0 - split};
    for (const auto& l : whole.lines) {
      first.lines.push_back(l);
      second.lines.push_back({l.at(split), l.slope, l.multiplicity});
    }
    EXPECT_EQ(sf_affine(first).flow + sf_affine(second).flow, sf_affine(whole).flow) << "split " << split;
  }
}

TEST(SfAffine, SphereFlowCountsLevelsPassed) {
  EXPECT_EQ(sf_affine(affine_path_from_model({Sphere3{1.0}, TrivialBundle{1}, 1.0})).flow, 0);
  EXPECT_EQ(sf_affine(affine_path_from_model({Sphere3{1.0}, TrivialBundle{1}, 2.0})).flow, 2);
  EXPECT_EQ(sf_affine(affine_path_from_model({Sphere3{1.0}, TrivialBundle{1}, 3.0})).flow, 2 + 6);
  EXPECT_EQ(sf_affine(affine_path_from_model({Sphere3{1.0}, TrivialBundle{1}, -2.0})).flow, -2);
}

TEST(SfAffine, RejectsDegenerateInput) {
  EXPECT_THROW(sf_affine({{{0.0, 0.0, 1}}, 1.0}), InvalidInput);
  EXPECT_THROW(sf_affine({{{1.0, 1.0, 0}}, 1.0}), InvalidInput);
  EXPECT_THROW(sf_affine({{{1.0, 1.0, 1}}, 0.0}), InvalidInput);
}

TEST(SfMatrix, DiagonalFamilyMatchesAffineLines) {
  const AffinePath p{{{-1.0, 2.0, 1}, {0.6, -1.0, 1}, {-0.3, 0.2, 1}, {0.25, -0.6, 1}}, 1.0};
  CMatrix a0 = CMatrix::Zero(4, 4), b = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    a0(i, i) = p.lines[i].intercept;
    b(i, i) = p.lines[i].slope;
  }
  const SfResult r = sf_matrix(affine_family(a0, b), {0.0, 0.3, 1.0});
  EXPECT_EQ(r.flow, sf_affine(p).flow);
  EXPECT_EQ(r.crossings.size(), 3u);
}

TEST(SfMatrix, RandomFamiliesAgreeWithEndpointInertia) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const CMatrix a0 = random_hermitian(8, seed), b = random_hermitian(8, 100 + seed);
    const SfResult r = sf_matrix(affine_family(a0, b), {0.0, 0.25, 0.5, 0.75, 1.0});
    EXPECT_EQ(r.flow, negative_count(a0) - negative_count(a0 + b)) << "seed " << seed;
    std::int64_t net = 0;
    for (const auto& c : r.crossings) net += c.direction * c.multiplicity;
    EXPECT_EQ(net, r.flow) << "localized crossings do not add up, seed " << seed;
  }
}

TEST(SfMatrix, TouchingEigenvalueContributesNoFlow) {
  // one eigenvalue comes down to zero and goes back up at u = 1/2
  const HermitianFamily f = [](double u) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = (u - 0.5) * (u - 0.5);
    m(1, 1) = 1.0;
    return m;
  };
  const SfResult r = sf_matrix(f, {0.0, 1.0});
  EXPECT_EQ(r.flow, 0);
  EXPECT_TRUE(r.crossings.empty());
}

TEST(SfMatrix, OppositeCrossingsBelowResolutionAreReported) {
  // two eigenvalues cross zero in opposite directions 1e-14 apart
  const HermitianFamily f = [](double u) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = u - 0.3;
    m(1, 1) = 0.3 + 1e-14 - u;
    return m;
  };
  EXPECT_THROW(sf_matrix(f, {0.0, 1.0}), ResolutionFailure);
}

TEST(SfMatrix, RejectsBadGrids) {
  const HermitianFamily f = affine_family(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2));
  EXPECT_THROW(sf_matrix(f, {0.0}), InvalidInput);
  EXPECT_THROW(sf_matrix(f, {0.0, 0.0, 1.0}), InvalidInput);
}

// Eta difference against spectral flow on the round sphere.

TEST(Cor33, SphereFlowAsExpectedButEtaDifferenceCarriesACubicTerm) {
  // With H = t vol on the unit sphere the eta difference minus twice the flow
  // is t/2 - 2t^3/3, while the predicted remainder is rank h/(2 pi^2) = t.
  // The residual is therefore |t/2 + 2t^3/3|, pinned here.
  for (double t : {-2.9, -1.2, -0.4, 0.3, 0.9, 2.1, 2.85}) {
    const Cor33Report r = check_cor33({Sphere3{1.0}, TrivialBundle{1}, t}, EngineOptions{});
    EXPECT_NEAR(r.h, t * 2.0 * std::numbers::pi * std::numbers::pi, 1e-12);
    EXPECT_NEAR(r.predicted, 2.0 * r.sf + t, 1e-12);
    EXPECT_NEAR(r.eta_twisted - r.eta_untwisted - 2.0 * r.sf, oracle::sphere_eta(t), 1e-11) << "t = " << t;
    EXPECT_NEAR(r.residual, std::abs(t / 2.0 + 2.0 * t * t * t / 3.0), 1e-11) << "t = " << t;
  }
}

TEST(Cor33, RankScalesTheIntegralTerm) {
  const Cor33Report one = check_cor33({Sphere3{1.0}, TrivialBundle{1}, 0.7}, EngineOptions{});
  const Cor33Report two = check_cor33({Sphere3{1.0}, TrivialBundle{2}, 0.7}, EngineOptions{});
  EXPECT_NEAR(two.predicted, 2.0 * one.predicted, 1e-12);
  EXPECT_NEAR(two.residual, 2.0 * one.residual, 1e-11);
}

TEST(Cor33, RejectsKernelAtAnEndpointAndCircleModels) {
  EXPECT_THROW(check_cor33({Sphere3{1.0}, TrivialBundle{1}, 1.5}, EngineOptions{}), InvalidInput);
  EXPECT_THROW(check_cor33({Circle{1.0}, CircleHolonomy{0.2}, 0.3}, EngineOptions{}), InvalidInput);
}

TEST(Prop31, SphereResidualPinned) {
  // half eta difference = sf + t/4 - t^3/3, integral term = -t/2
  for (double t : {-0.8, 0.35, 1.8}) {
    const Prop31Report r = check_prop31_reduced({Sphere3{1.0}, TrivialBundle{1}, t}, EngineOptions{});
    EXPECT_NEAR(r.integral_term, -t / 2.0, 1e-12);
    EXPECT_NEAR(r.residual, std::abs(t / 4.0 + t * t * t / 3.0), 1e-11) << "t = " << t;
  }
}

TEST(Prop31, ZeroFluxIsTrivialAndLensIsUnsupported) {
  const Prop31Report r = check_prop31_reduced({Sphere3{1.0}, TrivialBundle{1}, 0.0}, EngineOptions{});
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_EQ(r.sf, 0);
  EXPECT_THROW(check_prop31_reduced({Lens{3, 1.0}, LensCharacter{3, 1}, 0.2}, EngineOptions{}), Unsupported);
}
