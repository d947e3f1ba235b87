#include <gtest/gtest.h>

#include "oracles.hpp"
#include "twisted_dirac/clifford.hpp"

using namespace twisted_dirac;

namespace {

Multivector basis_vector(int i) { return {{{i}, Complex(1.0)}}; }

}  // namespace

TEST(GammaRep, ThreeDimensionalGeneratorsAreMinusIPauli) {
  const GammaRep rep(3);
  ASSERT_EQ(rep.spinor_dim(), 2);
  for (int j = 0; j < 3; ++j) {
    const CMatrix expected = Complex(0, -1) * oracle::pauli(j + 1);
    EXPECT_LT((rep.gamma(j) - expected).norm(), 1e-15) << "generator " << j;
  }
}

TEST(GammaRep, CliffordRelationsInEveryOddDimension) {
  for (int n = 1; n <= 9; n += 2) {
    const GammaRep rep(n);
    EXPECT_EQ(rep.spinor_dim(), 1 << ((n - 1) / 2));
    EXPECT_LE(rep.clifford_residual(), 1e-13) << "n = " << n;
    for (const auto& g : rep.gammas()) EXPECT_LT((g + g.adjoint()).norm(), 1e-15);
  }
}

TEST(GammaRep, RejectsEvenOrOutOfRangeDimension) {
  EXPECT_THROW(GammaRep(2), InvalidInput);
  EXPECT_THROW(GammaRep(0), InvalidInput);
  EXPECT_THROW(GammaRep(11), InvalidInput);
  EXPECT_THROW(GammaRep(3).gamma(3), InvalidInput);
}

TEST(Forms, RejectsMalformedComponents) {
  EXPECT_THROW(FormComponent(2, {{{1, 0}, 1.0}}), InvalidInput);
  EXPECT_THROW(FormComponent(2, {{{0}, 1.0}}), InvalidInput);
  EXPECT_THROW(FluxForm({FormComponent::random(3, 2, 1)}), InvalidInput);
  EXPECT_THROW(FluxForm({FormComponent::random(3, 1, 1), FormComponent::random(3, 1, 2)}), InvalidInput);
  EXPECT_THROW(FluxForm({FormComponent(1, {{{0}, Complex(0, 1)}})}), InvalidInput);
}

TEST(Forms, WedgeIsGradedCommutative) {
  const Multivector a = basis_vector(0), b = basis_vector(2);
  const Multivector ab = wedge(a, b), ba = wedge(b, a);
  ASSERT_EQ(ab.size(), 1u);
  EXPECT_EQ(ab.at({0, 2}), Complex(1.0));
  EXPECT_EQ(ba.at({0, 2}), Complex(-1.0));
  for (const auto& [k, v] : wedge(a, a)) EXPECT_EQ(v, Complex(0.0)) << "repeated index survives";
}

TEST(Forms, InteriorProductIsAnAntiderivation) {
  // iota_j(a ^ b) = iota_j a ^ b + (-1)^deg(a) a ^ iota_j b
  const Multivector a = FormComponent::random(5, 2, 11).to_multivector();
  const Multivector b = FormComponent::random(5, 3, 12).to_multivector();
  for (int j = 0; j < 5; ++j) {
    Multivector lhs = interior(j, wedge(a, b));
    const Multivector r1 = wedge(interior(j, a), b);
    const Multivector r2 = wedge(a, interior(j, b));
    for (const auto& [k, v] : r1) lhs[k] -= v;
    for (const auto& [k, v] : r2) lhs[k] -= v;  // deg(a) = 2
    for (const auto& [k, v] : lhs) EXPECT_LT(std::abs(v), 1e-12);
  }
}

TEST(CliffordAction, AdjointnessFollowsDegreeModFour) {
  for (int n : {3, 5, 7}) {
    const GammaRep rep(n);
    for (int k = 0; k <= n; ++k) {
      const CMatrix a = clifford_action(rep, FormComponent::random(n, k, 40 + k));
      if (degree_adjointness(k) == Adjointness::self_adjoint)
        EXPECT_LT((a - a.adjoint()).norm(), 1e-12) << "n=" << n << " k=" << k;
      else
        EXPECT_LT((a + a.adjoint()).norm(), 1e-12) << "n=" << n << " k=" << k;
    }
  }
}

TEST(CliffordAction, VolumeFluxActsAsPlusIdentityInDimensionThree) {
  const GammaRep rep(3);
  for (double t : {-1.3, 0.25, 2.0}) {
    const CMatrix c = flux_action(rep, FluxForm({FormComponent::volume(3, t)}));
    EXPECT_LT((c - t * rep.identity()).norm(), 1e-14);
  }
}

TEST(CliffordAction, FluxActionIsSelfAdjointForRandomForms) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 3 + 2 * static_cast<int>(seed % 3);
    std::vector<FormComponent> parts;
    for (int d = 1; d <= n; d += 2) parts.push_back(FormComponent::random(n, d, seed * 10 + d));
    const CMatrix c = flux_action(GammaRep(n), FluxForm(parts));
    EXPECT_LT((c - c.adjoint()).norm(), 1e-12 * std::max(1.0, c.norm())) << "seed " << seed;
  }
}

TEST(CliffordAction, RejectsIndicesBeyondDimension) {
  EXPECT_THROW(clifford_action(GammaRep(3), FormComponent(1, {{{3}, 1.0}})), InvalidInput);
  EXPECT_THROW(clifford_action(GammaRep(3), FormComponent::random(5, 4, 1)), InvalidInput);
}

TEST(EvenGammaRep, GradingAnticommutesWithOddForms) {
  for (int m : {1, 2, 3}) {
    const EvenGammaRep rep(m);
    EXPECT_LE(rep.clifford_residual(), 1e-13);
    const CMatrix& g = rep.grading();
    const CMatrix id = CMatrix::Identity(g.rows(), g.cols());
    EXPECT_LT((g * g - id).norm(), 1e-13);
    for (int k = 0; k <= 2 * m; ++k)
      EXPECT_LE(grading_anticommute_check(rep, FormComponent::random(2 * m, k, 70 + k)), 1e-12) << "k=" << k;
  }
}

TEST(EvenGammaRep, BoundaryReductionIdentities) {
  for (int m : {1, 2}) EXPECT_LE(boundary_reduction_check(m), 1e-12) << "m=" << m;
}

TEST(CheckHat, ScalesEachDegreeByItsInverseAndItself) {
  const FluxForm h({FormComponent::volume(3, 2.0), FormComponent::random(3, 1, 5)});
  const auto [check, hat] = check_hat(h);
  for (std::size_t i = 0; i < h.components().size(); ++i) {
    const auto& src = h.components()[i];
    const double k = src.degree();
    for (std::size_t t = 0; t < src.terms().size(); ++t) {
      EXPECT_NEAR(check.components()[i].terms()[t].coefficient.real(), src.terms()[t].coefficient.real() / k, 1e-15);
      EXPECT_NEAR(hat.components()[i].terms()[t].coefficient.real(), src.terms()[t].coefficient.real() * k, 1e-15);
    }
  }
}
