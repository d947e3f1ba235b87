#pragma once

#include <stdexcept>
#include <string>

namespace twisted_dirac {

// Precondition violated by the caller: bad dimension, out-of-range parameter,
// unsupported geometry/bundle pairing, non-polynomial multiplicity, ...
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The request is well formed but outside what a routine implements
// (e.g. Hurwitz engine on a torus spectrum).
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical decision could not be made at the requested resolution.
class ResolutionFailure : public std::runtime_error {
 public:
  ResolutionFailure(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

// A proven identity was contradicted by the computation (kernel below the
// PSC threshold, ...). Always a bug in conventions or inputs.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twisted_dirac
