#pragma once

#include "qesdx/rational.hpp"

namespace qesdx {

// Potential V(x) = rat(x^2) on (0, inf). A simple pole of rat at t = 0 is the
// centrifugal term; higher-order poles at the origin are rejected.
struct RationalPotential {
  RationalT rat;

  RationalPotential() = default;
  explicit RationalPotential(RationalT r) : rat(std::move(r)) {}

  Cplx eval(Real x) const { return rat.eval(Cplx(x * x, 0.0)); }
  Cplx eval_t(Cplx t) const { return rat.eval(t); }

  // Coefficient of 1/x^2: residue of the simple pole at t = 0 (0 if regular).
  Cplx centrifugal_coefficient() const;
  // Coefficient of x^6 (i.e. of t^3 in the polynomial part).
  Cplx sextic_coefficient() const;
};

}  // namespace qesdx
