#pragma once

#include <optional>
#include <vector>

#include "qesdx/potential.hpp"
#include "qesdx/quasiwave.hpp"

namespace qesdx {

// Exact-algebra verification layer. Every check reduces the terms of an
// identity to one shared representation (common product denominator, common
// leading power of x) and inspects the coefficients of the difference, so a
// pass certifies the identity for all x > 0, not just on a sample grid.

struct ResidualReport {
  Real norm = 0.0;  // max residual coefficient / max coefficient of V*f
  bool pass = false;
};

// Coefficient residual of (-f'' + V f - E f). Zero f passes trivially.
ResidualReport residual(const RationalT& V, Cplx E, const QuasiWave& f,
                        const Tolerances& tol = default_tols());

// -f'' + V f, exactly, inside the closed family.
QuasiWave schrodinger_apply(const RationalT& V, const QuasiWave& f,
                            const Tolerances& tol = default_tols());

// Relative coefficient gap between two functions of the closed family,
// measured in a shared representation. Zero means identical.
Real qw_rel_difference(const QuasiWave& p, const QuasiWave& q,
                       const Tolerances& tol = default_tols());

// Relative coefficient gap between two rationals via cross multiplication.
Real rat_rel_difference(const RationalT& x, const RationalT& y,
                        const Tolerances& tol = default_tols());

struct IntertwineReport {
  Real norm = 0.0;  // relative gap between L(H_in f) and H_out(L f)
  bool pass = false;
};

// First-order operator L = d/dx + W.
IntertwineReport intertwine_check(const Superpotential& W, const RationalT& V_in,
                                  const RationalT& V_out, const QuasiWave& f,
                                  const Tolerances& tol = default_tols());

// Second-order operator L f = W(wa, wb, f) / W(wa, wb).
IntertwineReport intertwine_check(const QuasiWave& wa, const QuasiWave& wb,
                                  const RationalT& V_in, const RationalT& V_out,
                                  const QuasiWave& f,
                                  const Tolerances& tol = default_tols());

struct FactorizationReport {
  Real err_minus = 0.0;  // gap in V_minus = W^2 - W' + alpha
  Real err_plus = 0.0;   // gap in V_plus  = W^2 + W' + alpha
  bool pass = false;
};

FactorizationReport factorization_check(const Superpotential& W, Cplx alpha,
                                        const RationalT& V_minus,
                                        const RationalT& V_plus,
                                        const Tolerances& tol = default_tols());

// Distinct positive real roots of den, ascending. These are the t-locations
// where the function is singular on the physical half line.
std::vector<Real> pole_scan(const PolyC& den,
                            const Tolerances& tol = default_tols());
std::vector<Real> pole_scan(const RationalT& r,
                            const Tolerances& tol = default_tols());

// True when every coefficient of the canonical form has negligible imaginary
// part, i.e. the function is real on the positive axis.
bool realness_check(const RationalT& r, const Tolerances& tol = default_tols());
bool realness_check(const QuasiWave& f, const Tolerances& tol = default_tols());

// True when the canonical coefficients are real and the overall scale is
// purely imaginary, so the function takes imaginary values on x > 0.
bool purely_imaginary(const QuasiWave& f,
                      const Tolerances& tol = default_tols());

struct NormalizableReport {
  bool normalizable = false;
  bool weak = false;  // integrable at 0 only thanks to the measure: sigma <= 1/2
  Real sigma = 0.0;
  std::vector<Real> poles;  // positive real den roots, each blocks square integrability
};

NormalizableReport normalizable(const QuasiWave& f,
                                const Tolerances& tol = default_tols());

// Simpson quadrature of |f|^2 on [x_lo, x_hi] with n panels (n even).
Real norm_integral(const QuasiWave& f, Real x_lo, Real x_hi, int n);

}  // namespace qesdx
