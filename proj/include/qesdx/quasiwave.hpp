#pragma once

#include <optional>

#include "qesdx/rational.hpp"

namespace qesdx {

// Member of the closed function family
//   scale * exp(-k*a*x^4/4) * x^sigma * num(x^2) / den(x^2)
// on x in (0, inf). The family is closed under d/dx, products, Wronskians,
// and quotients (with nonnegative resulting exp multiplier), which is what
// lets residual and intertwining checks run on exact coefficients.
//
// Canonical form: num and den monic with num(0) != 0 and den(0) != 0 (powers
// of t are absorbed into sigma), num/den coprime, all magnitude in `scale`.
// The zero function is scale = 0 with an empty numerator.
struct QuasiWave {
  Cplx scale{1.0, 0.0};
  Real a = 1.0;    // quartic scale in the exponent
  int k = 1;       // exponent multiplier, nonnegative
  Real sigma = 0.0;
  PolyC num = PolyC::identity();
  PolyC den = PolyC::identity();

  bool is_zero() const { return scale == Cplx(0.0) || num.is_zero(); }
};

// W(x) = x * g(x^2); exact for the negative logarithmic derivative of any
// QuasiWave, and odd in x whenever g is rational in t.
struct Superpotential {
  RationalT g;
  Cplx eval(Real x) const { return Real(x) * g.eval(Cplx(x * x, 0.0)); }
};

QuasiWave qw_canonicalize(QuasiWave q, const Tolerances& tol = default_tols());
QuasiWave qw_zero();

// Same a and k required; sigmas must differ by an even integer.
QuasiWave qw_add(const QuasiWave& f, const QuasiWave& g, const Tolerances& tol = default_tols());
QuasiWave qw_sub(const QuasiWave& f, const QuasiWave& g, const Tolerances& tol = default_tols());
QuasiWave qw_mul(const QuasiWave& f, const QuasiWave& g, const Tolerances& tol = default_tols());
// Divisor must be nonzero and the resulting exp multiplier nonnegative.
QuasiWave qw_div(const QuasiWave& f, const QuasiWave& g, const Tolerances& tol = default_tols());
QuasiWave qw_scale(const QuasiWave& f, Cplx s);
QuasiWave qw_conj(const QuasiWave& f);
// Multiply by a rational function of t.
QuasiWave qw_mul_rat(const QuasiWave& f, const RationalT& r, const Tolerances& tol = default_tols());

// d/dx; same a and k, sigma drops by one before canonical absorption.
QuasiWave qw_derivative(const QuasiWave& f, const Tolerances& tol = default_tols());

// f g' - g f'. Mismatched a is a domain error; k may differ.
QuasiWave qw_wronskian2(const QuasiWave& f, const QuasiWave& g,
                        const Tolerances& tol = default_tols());
// 3x3 Wronskian via cofactor expansion along the first row.
QuasiWave qw_wronskian3(const QuasiWave& f, const QuasiWave& g, const QuasiWave& h,
                        const Tolerances& tol = default_tols());

// Returns -f'/f as a Superpotential; zero input is a domain error.
Superpotential qw_log_derivative(const QuasiWave& f, const Tolerances& tol = default_tols());

// dW/dx as a rational function of t: g + 2 t g'.
RationalT superpotential_derivative(const Superpotential& w,
                                    const Tolerances& tol = default_tols());
// W(x)^2 as a rational function of t: t * g^2.
RationalT superpotential_square(const Superpotential& w, const Tolerances& tol = default_tols());

// Evaluate at real x > 0. Raises PoleError when den(x^2) underflows.
Cplx qw_eval(const QuasiWave& f, Real x);

// Ratio g/f when the two span the same ray (equal canonical num, den, sigma,
// k, a within tol); nullopt otherwise.
std::optional<Cplx> qw_ratio(const QuasiWave& f, const QuasiWave& g, Real tol = 1e-9);

}  // namespace qesdx
