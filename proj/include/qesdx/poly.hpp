#pragma once

#include <vector>

#include "qesdx/config.hpp"

namespace qesdx {

// Dense univariate polynomial over complex coefficients, ascending powers.
// Canonical form: no leading zero coefficients; the zero polynomial is the
// empty coefficient list. Dust removal: any coefficient with magnitude below
// coeff_zero_rel * max|coeff| is set to zero, and tiny real or imaginary
// parts (below the same budget) are dropped.
struct PolyC {
  std::vector<Cplx> c;

  PolyC() = default;
  PolyC(std::initializer_list<Cplx> init) : c(init) { canonicalize(); }
  explicit PolyC(std::vector<Cplx> coeffs) : c(std::move(coeffs)) { canonicalize(); }

  static PolyC constant(Cplx v) { return PolyC{{v}}; }
  static PolyC identity() { return PolyC{{Cplx(1.0, 0.0)}}; }

  bool is_zero() const { return c.empty(); }
  // Degree of the zero polynomial is -1.
  int degree() const { return static_cast<int>(c.size()) - 1; }
  Cplx lead() const { return c.empty() ? Cplx(0.0) : c.back(); }
  Cplx at(int k) const {
    return (k >= 0 && k < static_cast<int>(c.size())) ? c[static_cast<size_t>(k)] : Cplx(0.0);
  }

  Real max_mag() const;
  Cplx eval(Cplx t) const;
  void canonicalize(Real zero_rel = default_tols().coeff_zero_rel);
};

PolyC poly_add(const PolyC& p, const PolyC& q);
PolyC poly_sub(const PolyC& p, const PolyC& q);
PolyC poly_mul(const PolyC& p, const PolyC& q);
PolyC poly_scale(const PolyC& p, Cplx s);
PolyC poly_derivative(const PolyC& p);
PolyC poly_conj(const PolyC& p);
// Multiply by t^k, k >= 0.
PolyC poly_shift_up(const PolyC& p, int k);
bool poly_equal(const PolyC& p, const PolyC& q, Real tol);

inline PolyC operator+(const PolyC& p, const PolyC& q) { return poly_add(p, q); }
inline PolyC operator-(const PolyC& p, const PolyC& q) { return poly_sub(p, q); }
inline PolyC operator*(const PolyC& p, const PolyC& q) { return poly_mul(p, q); }
inline PolyC operator*(Cplx s, const PolyC& p) { return poly_scale(p, s); }

// All roots with multiplicity, sorted by (real, imag). Exact zero roots are
// factored out first; the rest come from the companion-matrix eigenproblem
// with a guarded Newton polish. Degree < 1 is a domain error.
std::vector<Cplx> poly_roots(const PolyC& p);

// Monic polynomial with the given roots.
PolyC roots_to_poly(const std::vector<Cplx>& roots);

// Roots collapsed into (location, multiplicity) clusters; cluster members
// within `radius` of a growing mean are merged and the mean reported.
struct RootCluster {
  Cplx location;
  int multiplicity;
};
std::vector<RootCluster> cluster_roots(const std::vector<Cplx>& roots,
                                       Real radius = 1e-6);

// Clusters the roots of p and polishes each multiple root with Newton on the
// matching derivative order, recovering full accuracy where the raw root
// finder only reaches a fractional power of machine precision.
std::vector<RootCluster> polished_clusters(const PolyC& p);

}  // namespace qesdx
