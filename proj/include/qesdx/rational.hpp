#pragma once

#include <vector>

#include "qesdx/poly.hpp"

namespace qesdx {

// Rational function of t. Canonical form: monic denominator, numerator and
// denominator coprime up to the root-matching tolerance. Poles at t = 0 are
// allowed here (potentials carry a 1/t term).
struct RationalT {
  PolyC num;
  PolyC den = PolyC::identity();

  RationalT() = default;
  RationalT(PolyC n, PolyC d) : num(std::move(n)), den(std::move(d)) {}

  static RationalT from_poly(PolyC p) { return RationalT(std::move(p), PolyC::identity()); }
  static RationalT constant(Cplx v) { return from_poly(PolyC::constant(v)); }

  bool is_zero() const { return num.is_zero(); }
  Cplx eval(Cplx t) const;
};

// Cancels numerator/denominator root pairs closer than tol.root_match.
// Roots are clustered first (repeated factors lose accuracy root-by-root but
// cluster means stay sharp); when any pair cancels, both sides are rebuilt
// from their remaining clusters and the result is cross-sampled against the
// input, reverting if values moved by more than 1e-8 relative.
RationalT rat_simplify(const RationalT& r, const Tolerances& tol = default_tols());

RationalT rat_add(const RationalT& x, const RationalT& y, const Tolerances& tol = default_tols());
RationalT rat_sub(const RationalT& x, const RationalT& y, const Tolerances& tol = default_tols());
RationalT rat_mul(const RationalT& x, const RationalT& y, const Tolerances& tol = default_tols());
RationalT rat_div(const RationalT& x, const RationalT& y, const Tolerances& tol = default_tols());
RationalT rat_scale(const RationalT& x, Cplx s);
// d/dt.
RationalT rat_derivative(const RationalT& x, const Tolerances& tol = default_tols());
RationalT rat_conj(const RationalT& x);
bool rat_equal(const RationalT& x, const RationalT& y, Real coeff_tol,
               const Tolerances& tol = default_tols());

inline RationalT operator+(const RationalT& x, const RationalT& y) { return rat_add(x, y); }
inline RationalT operator-(const RationalT& x, const RationalT& y) { return rat_sub(x, y); }
inline RationalT operator*(const RationalT& x, const RationalT& y) { return rat_mul(x, y); }

}  // namespace qesdx
