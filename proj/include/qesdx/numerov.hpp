#pragma once

#include <vector>

#include "qesdx/potential.hpp"

namespace qesdx {

// Finite-difference eigenvalue oracle, fully independent of the algebraic
// layer: it sees the potential only through pointwise evaluation.
struct NumerovConfig {
  Real x_min = 1e-3;
  Real x_max = 0.0;  // 0 = choose from the stiffness: (240 / a)^(1/4)
  Real step = 5e-4;
  Real e_lo = 0.0;
  Real e_hi = 0.0;
  Real bisect_tol = 1e-8;
};

struct NumerovLevel {
  Real energy = 0.0;
  int nodes = 0;
};

struct NumerovResult {
  std::vector<NumerovLevel> levels;
  Real x_max = 0.0;  // the end of the integration window actually used
};

// All eigenvalues in (e_lo, e_hi), located by node-count bisection and then
// sharpened by matching the outward and inward sweeps at the outermost
// classical turning point. The potential must be real and free of poles on
// [x_min, x_max]; a pole raises DomainError naming its location.
NumerovResult numerov_spectrum(const RationalPotential& V,
                               const NumerovConfig& cfg,
                               const Tolerances& tol = default_tols());

}  // namespace qesdx
