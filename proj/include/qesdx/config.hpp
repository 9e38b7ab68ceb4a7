#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qesdx {

// Single precision knob for the whole library.
using Real = double;
using Cplx = std::complex<Real>;

// Tolerance bundle threaded through algebra and verification.
// coeff_zero_rel:  a coefficient is zero if |c| < coeff_zero_rel * max|coeff|
// root_match:      absolute distance for numerator/denominator root cancellation
// residual:        pass threshold for normalized residual checks
// pole_floor:      a denominator root t* counts as on-domain when re(t*) > pole_floor
// realness:        per-coefficient imaginary budget, relative to 1 + |coeff|
struct Tolerances {
  Real coeff_zero_rel = 1e-9;
  Real root_match = 1e-8;
  Real residual = 1e-9;
  Real pole_floor = 1e-8;
  Real realness = 1e-9;
};

inline const Tolerances& default_tols() {
  static const Tolerances t{};
  return t;
}

// Invalid inputs or configurations (bad model parameters, malformed chains).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Algebra left the closed function family or an assembly lost too much precision.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Evaluation at (or too near) a pole; carries the offending location in t = x^2.
struct PoleError : std::runtime_error {
  Cplx location;
  PoleError(const std::string& msg, Cplx where)
      : std::runtime_error(msg), location(where) {}
};

}  // namespace qesdx
