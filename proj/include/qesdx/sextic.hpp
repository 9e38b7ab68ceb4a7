#pragma once

#include <vector>

#include "qesdx/oracle.hpp"
#include "qesdx/potential.hpp"
#include "qesdx/quasiwave.hpp"

namespace qesdx {

// Radial sextic oscillator with an algebraically closed sector of M+1 states:
//   V0 = a^2 t^3 - 2a(2M + 2s + 1) t + 4(s - 1/4)(s - 3/4)/t,   t = x^2.
struct SexticModel {
  Real a = 0.5;
  Real s = 0.5;
  int M = 0;
  RationalPotential V0;
};

struct SpectralEntry {
  Cplx energy;
  QuasiWave wave;        // canonical form, monic polynomial factor
  PolyC sector_poly;     // monic factor polynomial before power absorption
  int index = 0;         // position in the (Re E, Im E) ordering
  int nodes = 0;         // positive real zeros of odd multiplicity
  bool physical = false; // real energy and square integrable
  Real residual_norm = 0.0;
};

struct Spectrum {
  std::vector<SpectralEntry> entries;
  std::vector<Cplx> raw_eigenvalues;  // unclustered, as computed
  // Count of algebraic multiplicity not matched by independent states.
  // Nonzero only when the closure matrix is defective.
  int deficiency = 0;
};

struct ComplexPair {
  SpectralEntry minus;  // Im E < 0
  SpectralEntry plus;   // the literal conjugate partner
};

struct BetheReport {
  // Max absolute value over the sample points of the root-sum identity,
  // with the cross sum running over ordered resp. unordered index pairs.
  Real max_residual_ordered = 0.0;
  Real max_residual_unordered = 0.0;
  std::vector<Cplx> samples_t;
};

SexticModel build_model(Real a, Real s, int M);

// Solves the closure eigenproblem of the sector and returns the states,
// sorted by (Re E, Im E). Every returned state is verified against V0 by the
// exact residual check; failure throws.
Spectrum qes_spectrum(const SexticModel& m, const Tolerances& tol = default_tols());

// Partner parameters (1 - s, M + 2s - 1) leaving V0 unchanged. Requires
// M + 2s - 1 to be a nonnegative integer.
SexticModel covariant_model(const SexticModel& m);

// Non-real closure eigenvalues of the covariant sector, grouped into
// conjugate pairs and re-verified against the original V0.
std::vector<ComplexPair> complex_solutions(const SexticModel& m,
                                           const Tolerances& tol = default_tols());

// Roots of the state's polynomial factor, with multiplicity.
std::vector<Cplx> bethe_roots(const SpectralEntry& e);

// Evaluates the root-sum form of the closure condition at sample points
// away from the roots. The ordered convention vanishes identically for
// genuine sector data; the unordered one does not.
BetheReport verify_bethe_identity(const SexticModel& m, Cplx E,
                                  const std::vector<Cplx>& roots,
                                  const Tolerances& tol = default_tols());

}  // namespace qesdx
