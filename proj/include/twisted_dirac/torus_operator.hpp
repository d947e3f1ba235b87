#pragma once

// Twisted Dirac operator D + c(H) on the flat 3-torus in a truncated Fourier
// basis, for a variable-coefficient 3-form H = f(x) vol.
//
// Basis: spinor-valued plane waves exp(2 pi i sum_j (v_j + o_j) x_j / L_j),
// v in [-N, N]^3, where o = spin structure + holonomy. The scalar coefficient
// of H is a finite Fourier series
//   f(x) = sum_q fhat_q exp(2 pi i sum_j q_j x_j / L_j),   fhat_{-q} = conj(fhat_q),
// and multiplication by f couples mode v to v + q.

#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "twisted_dirac/clifford.hpp"
#include "twisted_dirac/error.hpp"
#include "twisted_dirac/spectral_models.hpp"

namespace twisted_dirac {

using Mode = std::array<int, 3>;
using SparseCMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// Real-valued finite Fourier series on T^3 (the scalar coefficient of a 3-form).
class TorusFlux {
 public:
  TorusFlux() = default;
  explicit TorusFlux(std::map<Mode, Complex> coefficients) : c_(std::move(coefficients)) {
    for (const auto& [q, v] : c_) {
      const Mode mq{-q[0], -q[1], -q[2]};
      auto it = c_.find(mq);
      const Complex partner = it == c_.end() ? Complex(0.0) : it->second;
      if (std::abs(partner - std::conj(v)) > 1e-14 * std::max(1.0, std::abs(v)))
        throw InvalidInput("TorusFlux: coefficient map is not hermitian symmetric (form not real)");
    }
  }

  static TorusFlux constant(double t) { return TorusFlux({{Mode{0, 0, 0}, Complex(t)}}); }

  /// amplitude * cos(2 pi x_axis / L_axis)
  static TorusFlux cosine(int axis, double amplitude) {
    Mode q{0, 0, 0};
    q[static_cast<std::size_t>(axis)] = 1;
    Mode mq{0, 0, 0};
    mq[static_cast<std::size_t>(axis)] = -1;
    return TorusFlux({{q, Complex(amplitude / 2)}, {mq, Complex(amplitude / 2)}});
  }

  const std::map<Mode, Complex>& coefficients() const { return c_; }

  Complex coefficient(const Mode& q) const {
    auto it = c_.find(q);
    return it == c_.end() ? Complex(0.0) : it->second;
  }

  int bandwidth() const {
    int b = 0;
    for (const auto& [q, v] : c_)
      if (v != Complex(0.0))
        for (int x : q) b = std::max(b, std::abs(x));
    return b;
  }

  TorusFlux plus_constant(double t) const {
    auto c = c_;
    c[Mode{0, 0, 0}] += t;
    return TorusFlux(std::move(c));
  }

  /// Pointwise product as a Fourier series (exact convolution).
  TorusFlux product(const TorusFlux& other) const {
    std::map<Mode, Complex> out;
    for (const auto& [a, va] : c_)
      for (const auto& [b, vb] : other.c_) out[Mode{a[0] + b[0], a[1] + b[1], a[2] + b[2]}] += va * vb;
    return TorusFlux(std::move(out));
  }

  bool is_constant() const { return bandwidth() == 0; }

 private:
  std::map<Mode, Complex> c_;
};

/// Index bookkeeping and elementary operators on the truncated mode space.
class TorusFourierBasis {
 public:
  TorusFourierBasis(const SpectralModel& model, int cutoff) : n_(cutoff) {
    model.validate();
    const auto* g = std::get_if<Torus3>(&model.geometry);
    if (!g) throw InvalidInput("TorusFourierBasis: model geometry must be torus3");
    if (cutoff < 1) throw InvalidInput("TorusFourierBasis: cutoff must be >= 1");
    lengths_ = g->lengths;
    offset_ = g->spin_structure;
    if (const auto* h = std::get_if<TorusHolonomy>(&model.bundle))
      for (int j = 0; j < 3; ++j) offset_[j] += h->theta[j];
    rank_ = model.rank();
  }

  int cutoff() const { return n_; }
  int side() const { return 2 * n_ + 1; }
  int mode_count() const { return side() * side() * side(); }
  /// Spinor (2) times bundle rank per mode.
  int fiber_dim() const { return 2 * rank_; }
  int dimension() const { return mode_count() * fiber_dim(); }

  int mode_index(const Mode& v) const {
    return ((v[0] + n_) * side() + (v[1] + n_)) * side() + (v[2] + n_);
  }
  Mode mode_at(int index) const {
    const int s = side();
    return Mode{index / (s * s) - n_, (index / s) % s - n_, index % s - n_};
  }
  bool in_box(const Mode& v, int margin = 0) const {
    for (int x : v)
      if (std::abs(x) > n_ - margin) return false;
    return true;
  }

  double momentum(const Mode& v, int j) const {
    return 2.0 * std::numbers::pi * (v[j] + offset_[j]) / lengths_[j];
  }

  /// nabla_{e_j}: multiplication by i k_j on each mode.
  SparseCMatrix derivative(int j) const {
    std::vector<Eigen::Triplet<Complex>> trip;
    for (int m = 0; m < mode_count(); ++m) {
      const Complex k = kI * momentum(mode_at(m), j);
      for (int s = 0; s < fiber_dim(); ++s) trip.emplace_back(m * fiber_dim() + s, m * fiber_dim() + s, k);
    }
    return assemble(trip);
  }

  /// Identity on modes (x) a fiber endomorphism (2x2 acting on spinors,
  /// identity on the bundle).
  SparseCMatrix fiber(const CMatrix& spinor_matrix) const {
    return multiplication(TorusFlux::constant(1.0), spinor_matrix);
  }

  /// Multiplication by the function f, tensored with a 2x2 spinor matrix.
  SparseCMatrix multiplication(const TorusFlux& f, const CMatrix& spinor_matrix) const {
    std::vector<Eigen::Triplet<Complex>> trip;
    for (int m = 0; m < mode_count(); ++m) {
      const Mode v = mode_at(m);
      for (const auto& [q, fq] : f.coefficients()) {
        if (fq == Complex(0.0)) continue;
        const Mode src{v[0] - q[0], v[1] - q[1], v[2] - q[2]};
        if (!in_box(src)) continue;
        const int col_mode = mode_index(src);
        for (int r = 0; r < rank_; ++r)
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
              const Complex val = fq * spinor_matrix(a, b);
              if (val != Complex(0.0))
                trip.emplace_back(m * fiber_dim() + 2 * r + a, col_mode * fiber_dim() + 2 * r + b, val);
            }
      }
    }
    return assemble(trip);
  }

 private:
  SparseCMatrix assemble(const std::vector<Eigen::Triplet<Complex>>& trip) const {
    SparseCMatrix m(dimension(), dimension());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
  }

  int n_;
  int rank_ = 1;
  Vec3 lengths_{};
  Vec3 offset_{};
};

/// Truncated D + c(H) on T^3 as a sparse Hermitian matrix.
struct ModeBlockOperator {
  int cutoff = 0;
  int bandwidth = 0;
  SparseCMatrix matrix;

  CMatrix to_dense() const { return CMatrix(matrix); }

  double hermitian_defect() const {
    SparseCMatrix diff = matrix - SparseCMatrix(matrix.adjoint());
    return diff.norm();
  }
};

/// D + c(H) with H = (model.flux_shift + f(x)) vol. With the Clifford
/// convention c(vol) = -I and the factor i^2 on 3-forms, c(H) = f(x) I.
inline ModeBlockOperator build_torus_operator(const SpectralModel& model, const TorusFlux& h3, int cutoff) {
  const TorusFourierBasis basis(model, cutoff);
  const GammaRep rep(3);
  const TorusFlux total = h3.plus_constant(model.flux_shift);
  const CMatrix vol_action = flux_action(rep, FluxForm({FormComponent::volume(3, 1.0)}));

  SparseCMatrix d(basis.dimension(), basis.dimension());
  for (int j = 0; j < 3; ++j) d += SparseCMatrix(basis.fiber(rep.gamma(j)) * basis.derivative(j));
  ModeBlockOperator op;
  op.cutoff = cutoff;
  op.bandwidth = total.bandwidth();
  op.matrix = d + basis.multiplication(total, vol_action);
  op.matrix.prune(Complex(0.0));
  return op;
}

}  // namespace twisted_dirac
