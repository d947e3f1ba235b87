#pragma once

// Concrete Clifford modules in odd dimension and the action of differential
// forms on them.
//
// Convention: c(e_j) are skew-adjoint unitary matrices with
//   c(e_i) c(e_j) + c(e_j) c(e_i) = -2 delta_ij.
// In dimension 3, c(e_j) = -i sigma_j (Pauli matrices), so that
//   c(e_1) c(e_2) c(e_3) = -I.
// Higher odd dimensions are built by tensoring with Pauli matrices; the
// construction is fully deterministic.
//
// Frame indices are zero based throughout: e_0, ..., e_{n-1}.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "twisted_dirac/error.hpp"

namespace twisted_dirac {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// i^p for integer p (exact, no pow()).
inline Complex i_pow(int p) {
  switch (((p % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

namespace detail {

inline CMatrix pauli(int which) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (which) {
    case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 2: m(0, 1) = -kI; m(1, 0) = kI; break;
    case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw InvalidInput("pauli: index must be 1, 2 or 3");
  }
  return m;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Hermitian generators (squares +1) of the complex Clifford algebra in odd
// dimension n, of size 2^((n-1)/2).
inline std::vector<CMatrix> hermitian_generators(int n) {
  if (n == 1) return {CMatrix::Identity(1, 1)};
  auto lower = hermitian_generators(n - 2);
  const auto d = lower.front().rows();
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(n));
  for (const auto& g : lower) out.push_back(kron(g, pauli(1)));
  out.push_back(kron(CMatrix::Identity(d, d), pauli(2)));
  out.push_back(kron(CMatrix::Identity(d, d), pauli(3)));
  return out;
}

inline double clifford_relation_residual(std::span<const CMatrix> c) {
  double worst = 0.0;
  const auto d = c.empty() ? 0 : c.front().rows();
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      CMatrix r = c[i] * c[j] + c[j] * c[i];
      if (i == j) r += 2.0 * CMatrix::Identity(d, d);
      worst = std::max(worst, r.norm());
    }
  }
  return worst;
}

}  // namespace detail

/// Clifford module for the odd-dimensional Euclidean space R^n.
class GammaRep {
 public:
  explicit GammaRep(int dim) : dim_(dim) {
    if (dim < 1 || dim > 9 || dim % 2 == 0)
      throw InvalidInput("GammaRep: dimension must be odd and in [1, 9], got " +
                         std::to_string(dim));
    for (auto& g : detail::hermitian_generators(dim)) gammas_.push_back(-kI * g);
  }

  int dim() const { return dim_; }
  int spinor_dim() const { return static_cast<int>(gammas_.front().rows()); }

  /// c(e_i), zero based.
  const CMatrix& gamma(int i) const {
    if (i < 0 || i >= dim_) throw InvalidInput("GammaRep::gamma: index out of range");
    return gammas_[static_cast<std::size_t>(i)];
  }
  std::span<const CMatrix> gammas() const { return gammas_; }

  CMatrix identity() const { return CMatrix::Identity(spinor_dim(), spinor_dim()); }

  /// max_ij |c_i c_j + c_j c_i + 2 delta_ij| (Frobenius).
  double clifford_residual() const { return detail::clifford_relation_residual(gammas_); }

 private:
  int dim_;
  std::vector<CMatrix> gammas_;
};

inline GammaRep build_gamma_rep(int n) { return GammaRep(n); }

// ---------------------------------------------------------------------------
// Forms.

/// Sparse element of the exterior algebra: sorted index tuple -> coefficient.
/// Mixed degrees allowed; used for contractions and wedge products.
using Multivector = std::map<std::vector<int>, Complex>;

struct FormTerm {
  std::vector<int> indices;  // strictly increasing
  Complex coefficient;
};

/// Homogeneous constant-coefficient form of a given degree.
class FormComponent {
 public:
  FormComponent() = default;
  FormComponent(int degree, std::vector<FormTerm> terms)
      : degree_(degree), terms_(std::move(terms)) {
    if (degree_ < 0) throw InvalidInput("FormComponent: negative degree");
    for (const auto& t : terms_) {
      if (static_cast<int>(t.indices.size()) != degree_)
        throw InvalidInput("FormComponent: term has wrong number of indices");
      for (std::size_t a = 0; a < t.indices.size(); ++a) {
        if (t.indices[a] < 0) throw InvalidInput("FormComponent: negative index");
        if (a > 0 && t.indices[a] <= t.indices[a - 1])
          throw InvalidInput("FormComponent: indices must be strictly increasing");
      }
    }
  }

  static FormComponent scalar(Complex value) { return FormComponent(0, {{{}, value}}); }

  /// coefficient * e_0 ^ ... ^ e_{n-1}
  static FormComponent volume(int n, Complex coefficient) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    return FormComponent(n, {{idx, coefficient}});
  }

  /// All C(n, k) basis terms with i.i.d. N(0,1) real coefficients.
  static FormComponent random(int n, int degree, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<FormTerm> terms;
    std::vector<bool> pick(static_cast<std::size_t>(n), false);
    std::fill(pick.begin(), pick.begin() + degree, true);
    do {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i)
        if (pick[static_cast<std::size_t>(i)]) idx.push_back(i);
      terms.push_back({idx, Complex(normal(rng), 0.0)});
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return FormComponent(degree, std::move(terms));
  }

  int degree() const { return degree_; }
  const std::vector<FormTerm>& terms() const { return terms_; }
  int max_index() const {
    int m = -1;
    for (const auto& t : terms_)
      if (!t.indices.empty()) m = std::max(m, t.indices.back());
    return m;
  }

  FormComponent scaled(Complex factor) const {
    auto terms = terms_;
    for (auto& t : terms) t.coefficient *= factor;
    return FormComponent(degree_, std::move(terms));
  }

  Multivector to_multivector(Complex factor = 1.0) const {
    Multivector out;
    for (const auto& t : terms_) out[t.indices] += factor * t.coefficient;
    return out;
  }

 private:
  int degree_ = 0;
  std::vector<FormTerm> terms_;
};

/// Interior product iota_{e_j}. Removing e_j from position p gives (-1)^p.
inline Multivector interior(int j, const Multivector& form) {
  Multivector out;
  for (const auto& [idx, v] : form) {
    auto it = std::find(idx.begin(), idx.end(), j);
    if (it == idx.end()) continue;
    const auto p = it - idx.begin();
    std::vector<int> rest(idx.begin(), it);
    rest.insert(rest.end(), it + 1, idx.end());
    out[rest] += (p % 2 == 0 ? 1.0 : -1.0) * v;
  }
  return out;
}

inline Multivector wedge(const Multivector& a, const Multivector& b) {
  Multivector out;
  for (const auto& [ia, va] : a) {
    for (const auto& [ib, vb] : b) {
      std::vector<int> idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      // sign of the sorting permutation, by counting inversions; repeated
      // indices kill the term
      int inversions = 0;
      bool repeated = false;
      for (std::size_t x = 0; x < idx.size() && !repeated; ++x)
        for (std::size_t y = x + 1; y < idx.size(); ++y) {
          if (idx[x] == idx[y]) { repeated = true; break; }
          if (idx[x] > idx[y]) ++inversions;
        }
      if (repeated) continue;
      std::sort(idx.begin(), idx.end());
      out[idx] += (inversions % 2 == 0 ? 1.0 : -1.0) * va * vb;
    }
  }
  return out;
}

/// sum coeff * c(e_i1) ... c(e_ik)
inline CMatrix clifford_action(const GammaRep& rep, const Multivector& form) {
  CMatrix out = CMatrix::Zero(rep.spinor_dim(), rep.spinor_dim());
  for (const auto& [idx, v] : form) {
    if (v == Complex(0.0)) continue;
    CMatrix p = rep.identity();
    for (int i : idx) {
      if (i >= rep.dim()) throw InvalidInput("clifford_action: index out of range");
      p = p * rep.gamma(i);
    }
    out += v * p;
  }
  return out;
}

inline CMatrix clifford_action(const GammaRep& rep, const FormComponent& form) {
  if (form.degree() > rep.dim())
    throw InvalidInput("clifford_action: degree exceeds dimension");
  if (form.max_index() >= rep.dim())
    throw InvalidInput("clifford_action: index out of range");
  return clifford_action(rep, form.to_multivector());
}

// ---------------------------------------------------------------------------
// Flux forms H = sum_j i^{j+1} H_{2j+1}.

/// Odd-degree form whose stored components are the REAL forms H_{2j+1}; the
/// factor i^{j+1} is applied when acting, never stored.
class FluxForm {
 public:
  FluxForm() = default;
  explicit FluxForm(std::vector<FormComponent> components) : components_(std::move(components)) {
    std::vector<int> seen;
    for (const auto& c : components_) {
      if (c.degree() % 2 == 0) throw InvalidInput("FluxForm: component degree must be odd");
      if (std::find(seen.begin(), seen.end(), c.degree()) != seen.end())
        throw InvalidInput("FluxForm: component degrees must be distinct");
      seen.push_back(c.degree());
      for (const auto& t : c.terms())
        if (t.coefficient.imag() != 0.0)
          throw InvalidInput("FluxForm: stored coefficients must be real");
    }
  }

  const std::vector<FormComponent>& components() const { return components_; }
  bool empty() const { return components_.empty(); }

  /// The complex form sum_j i^{j+1} H_{2j+1}.
  Multivector to_multivector() const {
    Multivector out;
    for (const auto& c : components_) {
      const int j = (c.degree() - 1) / 2;
      for (const auto& [idx, v] : c.to_multivector(i_pow(j + 1))) out[idx] += v;
    }
    return out;
  }

 private:
  std::vector<FormComponent> components_;
};

/// c(H) with the i^{j+1} convention; self-adjoint for every FluxForm.
inline CMatrix flux_action(const GammaRep& rep, const FluxForm& h) {
  CMatrix out = CMatrix::Zero(rep.spinor_dim(), rep.spinor_dim());
  for (const auto& c : h.components()) {
    const int j = (c.degree() - 1) / 2;
    out += i_pow(j + 1) * clifford_action(rep, c);
  }
  return out;
}

enum class Adjointness { self_adjoint, skew_adjoint };

/// Clifford multiplication by a real k-form is self-adjoint iff k = 0, 3 mod 4.
inline Adjointness degree_adjointness(int k) {
  if (k < 0) throw InvalidInput("degree_adjointness: negative degree");
  const int r = k % 4;
  return (r == 0 || r == 3) ? Adjointness::self_adjoint : Adjointness::skew_adjoint;
}

// ---------------------------------------------------------------------------
// Even-dimensional ambient module built from an odd one plus a normal
// direction, and the grading operator.

/// Clifford module for R^{2m}, m >= 1: c_X(e_a) = c(e_a) (x) sigma_1 for the
/// 2m-1 tangential directions, c_X(e_{2m-1}) = -i I (x) sigma_2 for the normal.
class EvenGammaRep {
 public:
  explicit EvenGammaRep(int m) : m_(m) {
    if (m < 1 || m > 5) throw InvalidInput("EvenGammaRep: m must be in [1, 5]");
    const GammaRep odd(2 * m - 1);
    for (const auto& c : odd.gammas()) gammas_.push_back(detail::kron(c, detail::pauli(1)));
    const auto d = odd.spinor_dim();
    gammas_.push_back(-kI * detail::kron(CMatrix::Identity(d, d), detail::pauli(2)));
    // gamma = i^m c(e_1 ... e_2m)
    grading_ = i_pow(m) * CMatrix::Identity(2 * d, 2 * d);
    for (const auto& g : gammas_) grading_ = grading_ * g;
  }

  int dim() const { return 2 * m_; }
  int half_dim() const { return m_; }
  int spinor_dim() const { return static_cast<int>(gammas_.front().rows()); }
  const CMatrix& gamma(int i) const { return gammas_.at(static_cast<std::size_t>(i)); }
  std::span<const CMatrix> gammas() const { return gammas_; }
  const CMatrix& grading() const { return grading_; }
  /// Clifford multiplication by the unit normal e_{2m}.
  const CMatrix& normal() const { return gammas_.back(); }

  CMatrix action(const Multivector& form) const {
    CMatrix out = CMatrix::Zero(spinor_dim(), spinor_dim());
    for (const auto& [idx, v] : form) {
      CMatrix p = CMatrix::Identity(spinor_dim(), spinor_dim());
      for (int i : idx) {
        if (i >= dim()) throw InvalidInput("EvenGammaRep::action: index out of range");
        p = p * gammas_[static_cast<std::size_t>(i)];
      }
      out += v * p;
    }
    return out;
  }

  double clifford_residual() const { return detail::clifford_relation_residual(gammas_); }

 private:
  int m_;
  std::vector<CMatrix> gammas_;
  CMatrix grading_;
};

/// || c(alpha) gamma - (-1)^deg gamma c(alpha) ||
inline double grading_anticommute_check(const EvenGammaRep& rep, const FormComponent& form) {
  if (form.max_index() >= rep.dim())
    throw InvalidInput("grading_anticommute_check: index out of range");
  const CMatrix a = rep.action(form.to_multivector());
  const double sign = form.degree() % 2 == 0 ? 1.0 : -1.0;
  return (a * rep.grading() - sign * rep.grading() * a).norm();
}

/// Boundary identification c_Y(U) = -sigma c_X(U), sigma = c_X(e_{2m}).
///
/// Returns the largest of
///  - the Clifford relation defect of c_Y on the 2m-1 tangential directions,
///  - || sigma^2 + I ||,
///  - || [c_Y(e_i), gamma_X] || (c_Y preserves the chirality splitting),
///  - || c_Y(alpha) + sigma c_X(alpha) || for random tangential 1- and
///    3-forms alpha, where c_Y(alpha) is built from the c_Y generators (the
///    symbol identity used to move c(H) through sigma).
inline double boundary_reduction_check(int m, std::uint64_t seed = 7) {
  if (m < 1 || m > 2) throw InvalidInput("boundary_reduction_check: m must be 1 or 2");
  const EvenGammaRep x(m);
  const CMatrix& sigma = x.normal();
  const int tangential = 2 * m - 1;
  const auto d = x.spinor_dim();
  const CMatrix id = CMatrix::Identity(d, d);

  std::vector<CMatrix> cy;
  for (int i = 0; i < tangential; ++i) cy.push_back(-sigma * x.gamma(i));

  double worst = detail::clifford_relation_residual(cy);
  worst = std::max(worst, (sigma * sigma + id).norm());
  for (const auto& c : cy) worst = std::max(worst, (c * x.grading() - x.grading() * c).norm());

  for (int degree : {1, 3}) {
    if (degree > tangential) continue;
    const auto alpha = FormComponent::random(tangential, degree, seed + static_cast<std::uint64_t>(degree));
    CMatrix via_y = CMatrix::Zero(d, d);
    for (const auto& t : alpha.terms()) {
      CMatrix p = id;
      for (int i : t.indices) p = p * cy[static_cast<std::size_t>(i)];
      via_y += t.coefficient * p;
    }
    const CMatrix via_x = x.action(alpha.to_multivector());
    worst = std::max(worst, (via_y + sigma * via_x).norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Check/hat forms: H = sum_k H_k  ->  (sum H_k / k, sum k H_k).

inline std::pair<std::vector<FormComponent>, std::vector<FormComponent>> check_hat(
    const std::vector<FormComponent>& h) {
  std::vector<FormComponent> check, hat;
  for (const auto& c : h) {
    if (c.degree() == 0) throw InvalidInput("check_hat: degree-0 component present");
    const double k = static_cast<double>(c.degree());
    check.push_back(c.scaled(1.0 / k));
    hat.push_back(c.scaled(k));
  }
  return {check, hat};
}

inline std::pair<FluxForm, FluxForm> check_hat(const FluxForm& h) {
  auto [check, hat] = check_hat(h.components());
  return {FluxForm(std::move(check)), FluxForm(std::move(hat))};
}

}  // namespace twisted_dirac
