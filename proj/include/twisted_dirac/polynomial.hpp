#pragma once

// Integer-valued polynomials in the binomial (falling-factorial) basis,
//   m(k) = sum_i c_i * C(k, i),
// with integer c_i. A polynomial is integer valued on the integers exactly
// when its binomial coefficients are integers, so multiplicities are
// represented without rounding.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "twisted_dirac/error.hpp"

namespace twisted_dirac {

class MultiplicityPolynomial {
 public:
  MultiplicityPolynomial() = default;
  explicit MultiplicityPolynomial(std::vector<std::int64_t> binomial_coefficients)
      : c_(std::move(binomial_coefficients)) {
    trim();
  }

  /// Fits the unique polynomial of degree <= max_degree through
  /// values[q] = m(q), q = 0, 1, ..., and requires every remaining sample to
  /// lie on it (forward differences of order > max_degree vanish).
  static MultiplicityPolynomial from_samples(std::span<const std::int64_t> values, int max_degree) {
    if (values.empty()) throw InvalidInput("from_samples: no samples");
    std::vector<std::int64_t> diff(values.begin(), values.end());
    std::vector<std::int64_t> coeffs;
    for (std::size_t order = 0; order < values.size(); ++order) {
      const std::int64_t head = diff.front();
      if (static_cast<int>(order) <= max_degree) {
        coeffs.push_back(head);
      } else {
        for (auto v : diff)
          if (v != 0)
            throw InvalidInput("multiplicity samples are not a polynomial of degree <= " +
                               std::to_string(max_degree));
        break;
      }
      for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
      diff.pop_back();
    }
    return MultiplicityPolynomial(std::move(coeffs));
  }

  /// Convenience: monomial-basis integer coefficients (ascending powers).
  static MultiplicityPolynomial from_monomials(std::span<const std::int64_t> ascending) {
    const int deg = static_cast<int>(ascending.size()) - 1;
    std::vector<std::int64_t> samples;
    for (int q = 0; q <= deg + 1; ++q) {
      std::int64_t v = 0, p = 1;
      for (auto c : ascending) { v += c * p; p *= q; }
      samples.push_back(v);
    }
    return from_samples(samples, deg < 0 ? 0 : deg);
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<std::int64_t>& binomial_coefficients() const { return c_; }
  bool is_zero() const { return c_.empty(); }

  std::int64_t operator()(std::int64_t k) const {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < c_.size(); ++i) total += c_[i] * binom(k, static_cast<std::int64_t>(i));
    return total;
  }

  /// q -> m(q + shift) (Vandermonde convolution keeps integer coefficients).
  MultiplicityPolynomial shifted(std::int64_t shift) const {
    std::vector<std::int64_t> out(c_.size(), 0);
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        out[j] += c_[i] * binom(shift, static_cast<std::int64_t>(i - j));
    return MultiplicityPolynomial(std::move(out));
  }

  MultiplicityPolynomial scaled(std::int64_t factor) const {
    auto out = c_;
    for (auto& v : out) v *= factor;
    return MultiplicityPolynomial(std::move(out));
  }

  /// Coefficients b_i with m(k) = sum_i b_i (k + x)^i.
  std::vector<long double> power_coefficients_about(long double x) const {
    std::vector<long double> result(c_.size(), 0.0L);
    // C(k, i) = prod_{r<i} (y - x - r) / i!, y = k + x
    std::vector<long double> prod{1.0L};
    long double factorial = 1.0L;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i > 0) {
        const long double root = x + static_cast<long double>(i - 1);
        std::vector<long double> next(prod.size() + 1, 0.0L);
        for (std::size_t a = 0; a < prod.size(); ++a) {
          next[a + 1] += prod[a];
          next[a] -= root * prod[a];
        }
        prod = std::move(next);
        factorial *= static_cast<long double>(i);
      }
      for (std::size_t a = 0; a < prod.size(); ++a)
        result[a] += static_cast<long double>(c_[i]) * prod[a] / factorial;
    }
    return result;
  }

  friend bool operator==(const MultiplicityPolynomial&, const MultiplicityPolynomial&) = default;

 private:
  static std::int64_t binom(std::int64_t k, std::int64_t i) {
    // generalized binomial for integer k (negative k allowed)
    std::int64_t num = 1, den = 1;
    for (std::int64_t r = 0; r < i; ++r) {
      num *= (k - r);
      den *= (r + 1);
    }
    return num / den;
  }

  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<std::int64_t> c_;
};

}  // namespace twisted_dirac
