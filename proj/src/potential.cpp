#include "qesdx/potential.hpp"

namespace qesdx {

namespace {
int low_zero_count(const PolyC& p) {
  int e = 0;
  while (e <= p.degree() && std::abs(p.at(e)) == 0.0) ++e;
  return e;
}
}  // namespace

Cplx RationalPotential::centrifugal_coefficient() const {
  const PolyC& den = rat.den;
  int e = low_zero_count(den);
  if (e == 0) return Cplx(0.0, 0.0);
  if (e > 1) throw DomainError("potential has a pole of order > 2 at the origin");
  PolyC cof;  // den / t
  cof.c.assign(den.c.begin() + 1, den.c.end());
  Cplx d0 = cof.at(0);
  if (std::abs(d0) == 0.0)
    throw DomainError("potential has a pole of order > 2 at the origin");
  return rat.num.at(0) / d0;
}

Cplx RationalPotential::sextic_coefficient() const {
  // Canonical den is monic, so the t^3 term of the polynomial part is the
  // numerator coefficient three slots above the denominator degree.
  int d = rat.den.degree();
  if (d < 0) return Cplx(0.0, 0.0);
  return rat.num.at(d + 3);
}

}  // namespace qesdx
