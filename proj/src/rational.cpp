#include "qesdx/rational.hpp"

#include <algorithm>
#include <cmath>

namespace qesdx {

namespace {

// Synthetic division by (t - r); the remainder is dropped, so r must be a
// root of p up to noise.
PolyC poly_deflate(const PolyC& p, Cplx r) {
  if (p.degree() < 1) return PolyC{};
  std::vector<Cplx> out(p.c.size() - 1, Cplx(0.0));
  Cplx carry = p.c.back();
  for (size_t i = p.c.size() - 1; i-- > 0;) {
    out[i] = carry;
    carry = p.c[i] + r * carry;
  }
  return PolyC(std::move(out));
}

PolyC poly_deflate_all(PolyC p, const std::vector<Cplx>& roots) {
  for (const auto& r : roots) p = poly_deflate(p, r);
  return p;
}

std::vector<RootCluster> clustered_roots_of(const PolyC& p) {
  return polished_clusters(p);
}

// Locations shared by the two denominators, each repeated min(multiplicity).
std::vector<Cplx> shared_locations(std::vector<RootCluster> a, std::vector<RootCluster> b,
                                   Real match_tol) {
  std::vector<Cplx> shared;
  for (auto& x : a) {
    for (auto& y : b) {
      if (x.multiplicity == 0 || y.multiplicity == 0) continue;
      if (std::abs(x.location - y.location) > match_tol) continue;
      const int k = std::min(x.multiplicity, y.multiplicity);
      const Cplx loc = (x.location + y.location) / 2.0;
      for (int i = 0; i < k; ++i) shared.push_back(loc);
      x.multiplicity -= k;
      y.multiplicity -= k;
    }
  }
  return shared;
}

RationalT monicized(PolyC num, PolyC den) {
  if (num.is_zero()) return RationalT(PolyC{}, PolyC::identity());
  const Cplx lead = den.lead();
  return RationalT(poly_scale(num, Cplx(1.0) / lead), poly_scale(den, Cplx(1.0) / lead));
}

std::vector<Cplx> sample_ring(Real radius) {
  std::vector<Cplx> pts;
  for (int j = 0; j < 5; ++j) {
    const Real th = 0.7 + 1.1 * j;
    pts.emplace_back(radius * std::cos(th), radius * std::sin(th));
  }
  return pts;
}

}  // namespace

Cplx RationalT::eval(Cplx t) const {
  const Cplx d = den.eval(t);
  const Real scale = std::max(den.max_mag(), Real(1.0));
  if (std::abs(d) < 1e-300 * scale) throw PoleError("rational evaluated at a pole", t);
  return num.eval(t) / d;
}

RationalT rat_simplify(const RationalT& r, const Tolerances& tol) {
  if (r.den.is_zero()) throw DomainError("rat_simplify: zero denominator");
  if (r.num.is_zero()) return RationalT(PolyC{}, PolyC::identity());
  if (r.den.degree() == 0)
    return RationalT(poly_scale(r.num, Cplx(1.0) / r.den.lead()), PolyC::identity());
  if (r.num.degree() == 0) return monicized(r.num, r.den);

  const auto nc = clustered_roots_of(r.num);
  const auto dc = clustered_roots_of(r.den);
  const auto shared = shared_locations(nc, dc, tol.root_match);
  if (shared.empty()) return monicized(r.num, r.den);

  Real max_root = 0.0;
  for (const auto& cl : nc) max_root = std::max(max_root, std::abs(cl.location));
  for (const auto& cl : dc) max_root = std::max(max_root, std::abs(cl.location));

  RationalT out = monicized(poly_deflate_all(r.num, shared), poly_deflate_all(r.den, shared));
  if (out.den.is_zero() || out.num.is_zero()) return monicized(r.num, r.den);

  // Cross-sample against the input away from all roots; revert on drift.
  for (const auto& t : sample_ring(1.5 * max_root + 1.0)) {
    const Cplx before = r.num.eval(t) / r.den.eval(t);
    const Cplx after = out.eval(t);
    if (std::abs(before - after) > 1e-8 * (1.0 + std::abs(before)))
      return monicized(r.num, r.den);
  }
  return out;
}

RationalT rat_add(const RationalT& x, const RationalT& y, const Tolerances& tol) {
  if (x.is_zero()) return rat_simplify(y, tol);
  if (y.is_zero()) return rat_simplify(x, tol);
  if (poly_equal(x.den, y.den, 1e-13))
    return rat_simplify(RationalT(poly_add(x.num, y.num), x.den), tol);

  std::vector<Cplx> shared;
  if (x.den.degree() >= 1 && y.den.degree() >= 1)
    shared = shared_locations(clustered_roots_of(x.den), clustered_roots_of(y.den),
                              tol.root_match);

  if (shared.empty()) {
    const PolyC num = poly_add(poly_mul(x.num, y.den), poly_mul(y.num, x.den));
    return rat_simplify(RationalT(num, poly_mul(x.den, y.den)), tol);
  }

  // Common denominator = lcm of the two; the shared part is divided out of
  // each cofactor so repeated factors never accumulate beyond the inputs.
  const PolyC cof_y = poly_deflate_all(x.den, shared);  // lcm / y.den
  const PolyC cof_x = poly_deflate_all(y.den, shared);  // lcm / x.den
  const PolyC den = (y.den.degree() >= x.den.degree()) ? poly_mul(cof_y, y.den)
                                                       : poly_mul(cof_x, x.den);
  const PolyC num = poly_add(poly_mul(x.num, cof_x), poly_mul(y.num, cof_y));
  return rat_simplify(RationalT(num, den), tol);
}

RationalT rat_sub(const RationalT& x, const RationalT& y, const Tolerances& tol) {
  return rat_add(x, rat_scale(y, Cplx(-1.0)), tol);
}

RationalT rat_mul(const RationalT& x, const RationalT& y, const Tolerances& tol) {
  if (x.is_zero() || y.is_zero()) return RationalT(PolyC{}, PolyC::identity());
  return rat_simplify(RationalT(poly_mul(x.num, y.num), poly_mul(x.den, y.den)), tol);
}

RationalT rat_div(const RationalT& x, const RationalT& y, const Tolerances& tol) {
  if (y.is_zero()) throw DomainError("rat_div: division by the zero rational");
  if (x.is_zero()) return RationalT(PolyC{}, PolyC::identity());
  return rat_simplify(RationalT(poly_mul(x.num, y.den), poly_mul(x.den, y.num)), tol);
}

RationalT rat_scale(const RationalT& x, Cplx s) {
  if (s == Cplx(0.0) || x.is_zero()) return RationalT(PolyC{}, PolyC::identity());
  return RationalT(poly_scale(x.num, s), x.den);
}

RationalT rat_derivative(const RationalT& x, const Tolerances& tol) {
  if (x.is_zero()) return RationalT(PolyC{}, PolyC::identity());
  if (x.den.degree() == 0)
    return RationalT(poly_scale(poly_derivative(x.num), Cplx(1.0) / x.den.lead()),
                     PolyC::identity());
  const PolyC n = poly_sub(poly_mul(poly_derivative(x.num), x.den),
                           poly_mul(x.num, poly_derivative(x.den)));
  return rat_simplify(RationalT(n, poly_mul(x.den, x.den)), tol);
}

RationalT rat_conj(const RationalT& x) { return RationalT(poly_conj(x.num), poly_conj(x.den)); }

bool rat_equal(const RationalT& x, const RationalT& y, Real coeff_tol, const Tolerances&) {
  return poly_equal(poly_mul(x.num, y.den), poly_mul(y.num, x.den), coeff_tol);
}

}  // namespace qesdx
