#include "qesdx/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace qesdx {

namespace {

// Rewrites a set of commensurable family members over one shared denominator
// and one shared leading power, returning the aligned numerators. The shared
// denominator is the plain product of the member denominators; nothing is
// cancelled, so every numerator transport is exact polynomial arithmetic.
std::vector<PolyC> aligned_numerators(const std::vector<QuasiWave>& terms) {
  std::vector<const QuasiWave*> live;
  for (const auto& t : terms)
    if (!t.is_zero()) live.push_back(&t);
  std::vector<PolyC> out(terms.size());
  if (live.empty()) return out;

  Real a0 = live.front()->a;
  int k0 = live.front()->k;
  Real sigma_min = live.front()->sigma;
  for (const auto* t : live) {
    if (std::abs(t->a - a0) > 1e-12 * (1.0 + std::abs(a0)) || t->k != k0)
      throw DomainError("cannot align family members with different weights");
    sigma_min = std::min(sigma_min, t->sigma);
  }

  PolyC shared_den = PolyC::identity();
  for (const auto* t : live) shared_den = poly_mul(shared_den, t->den);

  for (std::size_t i = 0; i < terms.size(); ++i) {
    const QuasiWave& t = terms[i];
    if (t.is_zero()) continue;
    // x^(sigma - sigma_min) = t^m with t = x^2, an exact slot shift.
    Real off = (t.sigma - sigma_min) / 2.0;
    int m = static_cast<int>(std::lround(off));
    if (std::abs(off - m) > 1e-9)
      throw DomainError("cannot align family members: fractional power offset");
    PolyC n = poly_scale(t.num, t.scale);
    for (const auto& u : terms)
      if (!u.is_zero() && &u != &t) n = poly_mul(n, u.den);
    out[i] = poly_shift_up(n, m);
  }
  return out;
}

Real max_mag(const PolyC& p) { return p.max_mag(); }

}  // namespace

ResidualReport residual(const RationalT& V, Cplx E, const QuasiWave& f,
                        const Tolerances& tol) {
  ResidualReport rep;
  if (f.is_zero()) {
    rep.pass = true;
    return rep;
  }
  QuasiWave d2 = qw_derivative(qw_derivative(f, tol), tol);
  QuasiWave vf = qw_mul_rat(f, V, tol);
  QuasiWave ef = qw_scale(f, E);

  auto nums = aligned_numerators({vf, d2, ef});
  PolyC r = poly_sub(poly_sub(nums[0], nums[1]), nums[2]);

  Real scale = max_mag(nums[0]);
  if (scale == 0.0)
    scale = std::max({max_mag(nums[1]), max_mag(nums[2]), 1e-300});
  rep.norm = max_mag(r) / scale;
  rep.pass = rep.norm < tol.residual;
  return rep;
}

Real qw_rel_difference(const QuasiWave& p, const QuasiWave& q,
                       const Tolerances& tol) {
  (void)tol;
  if (p.is_zero() && q.is_zero()) return 0.0;
  auto nums = aligned_numerators({p, q});
  Real scale = std::max({max_mag(nums[0]), max_mag(nums[1]), 1e-300});
  return max_mag(poly_sub(nums[0], nums[1])) / scale;
}

Real rat_rel_difference(const RationalT& x, const RationalT& y,
                        const Tolerances& tol) {
  (void)tol;
  PolyC lhs = poly_mul(x.num, y.den);
  PolyC rhs = poly_mul(y.num, x.den);
  Real scale = std::max({max_mag(lhs), max_mag(rhs), 1e-300});
  return max_mag(poly_sub(lhs, rhs)) / scale;
}

namespace {

QuasiWave apply_w(const QuasiWave& f, const Superpotential& W,
                  const Tolerances& tol) {
  QuasiWave h = qw_mul_rat(f, W.g, tol);
  if (h.is_zero()) return h;
  h.sigma += 1.0;  // W(x) = x * g(x^2)
  return h;
}

}  // namespace

QuasiWave schrodinger_apply(const RationalT& V, const QuasiWave& f,
                            const Tolerances& tol) {
  return qw_sub(qw_mul_rat(f, V, tol),
                qw_derivative(qw_derivative(f, tol), tol), tol);
}

IntertwineReport intertwine_check(const Superpotential& W, const RationalT& V_in,
                                  const RationalT& V_out, const QuasiWave& f,
                                  const Tolerances& tol) {
  auto L = [&](const QuasiWave& u) {
    return qw_add(qw_derivative(u, tol), apply_w(u, W, tol), tol);
  };
  QuasiWave lhs = L(schrodinger_apply(V_in, f, tol));
  QuasiWave rhs = schrodinger_apply(V_out, L(f), tol);
  IntertwineReport rep;
  rep.norm = qw_rel_difference(lhs, rhs, tol);
  rep.pass = rep.norm < tol.residual;
  return rep;
}

IntertwineReport intertwine_check(const QuasiWave& wa, const QuasiWave& wb,
                                  const RationalT& V_in, const RationalT& V_out,
                                  const QuasiWave& f, const Tolerances& tol) {
  QuasiWave w2 = qw_wronskian2(wa, wb, tol);
  if (w2.is_zero()) throw DomainError("degenerate pair: vanishing Wronskian");
  auto L = [&](const QuasiWave& u) {
    QuasiWave w3 = qw_wronskian3(wa, wb, u, tol);
    if (w3.is_zero()) {
      QuasiWave z = qw_zero();
      z.a = u.a;
      return z;
    }
    return qw_div(w3, w2, tol);
  };
  QuasiWave lhs = L(schrodinger_apply(V_in, f, tol));
  QuasiWave rhs = schrodinger_apply(V_out, L(f), tol);
  IntertwineReport rep;
  rep.norm = qw_rel_difference(lhs, rhs, tol);
  rep.pass = rep.norm < tol.residual;
  return rep;
}

FactorizationReport factorization_check(const Superpotential& W, Cplx alpha,
                                        const RationalT& V_minus,
                                        const RationalT& V_plus,
                                        const Tolerances& tol) {
  RationalT ww = superpotential_square(W, tol);
  RationalT wp = superpotential_derivative(W, tol);
  RationalT shift = RationalT::constant(alpha);
  RationalT cand_minus = rat_add(rat_sub(ww, wp, tol), shift, tol);
  RationalT cand_plus = rat_add(rat_add(ww, wp, tol), shift, tol);
  FactorizationReport rep;
  rep.err_minus = rat_rel_difference(V_minus, cand_minus, tol);
  rep.err_plus = rat_rel_difference(V_plus, cand_plus, tol);
  rep.pass = rep.err_minus < tol.residual && rep.err_plus < tol.residual;
  return rep;
}

std::vector<Real> pole_scan(const PolyC& den, const Tolerances& tol) {
  std::vector<Real> out;
  if (den.degree() < 1) return out;
  auto clusters = polished_clusters(den);
  for (const auto& c : clusters) {
    if (c.location.real() > tol.pole_floor &&
        std::abs(c.location.imag()) < tol.pole_floor)
      out.push_back(c.location.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Real> pole_scan(const RationalT& r, const Tolerances& tol) {
  return pole_scan(r.den, tol);
}

namespace {
bool coeffs_real(const PolyC& p, const Tolerances& tol) {
  for (const auto& c : p.c)
    if (std::abs(c.imag()) > tol.realness * (1.0 + std::abs(c))) return false;
  return true;
}
}  // namespace

bool realness_check(const RationalT& r, const Tolerances& tol) {
  return coeffs_real(r.num, tol) && coeffs_real(r.den, tol);
}

bool realness_check(const QuasiWave& f, const Tolerances& tol) {
  if (f.is_zero()) return true;
  if (std::abs(f.scale.imag()) > tol.realness * (1.0 + std::abs(f.scale)))
    return false;
  return coeffs_real(f.num, tol) && coeffs_real(f.den, tol);
}

bool purely_imaginary(const QuasiWave& f, const Tolerances& tol) {
  if (f.is_zero()) return false;
  if (std::abs(f.scale.real()) > tol.realness * (1.0 + std::abs(f.scale)))
    return false;
  if (std::abs(f.scale.imag()) <= tol.realness * (1.0 + std::abs(f.scale)))
    return false;
  return coeffs_real(f.num, tol) && coeffs_real(f.den, tol);
}

NormalizableReport normalizable(const QuasiWave& f, const Tolerances& tol) {
  NormalizableReport rep;
  rep.sigma = f.sigma;
  if (f.is_zero()) return rep;
  rep.poles = pole_scan(f.den, tol);
  // exp(-k a x^4 / 4) kills the tail for k >= 1; integrability at the origin
  // requires sigma > -1/2. The weak band only clears the bar because of the
  // x^{2 sigma} measure weight, flag it.
  rep.normalizable = rep.poles.empty() && f.k >= 1 && f.sigma > -0.5;
  rep.weak = rep.normalizable && f.sigma <= 0.5 + 1e-12;
  return rep;
}

Real norm_integral(const QuasiWave& f, Real x_lo, Real x_hi, int n) {
  if (n < 2) n = 2;
  if (n % 2) ++n;
  Real h = (x_hi - x_lo) / n;
  auto g = [&](Real x) {
    Cplx v = qw_eval(f, x);
    return std::norm(v);
  };
  Real acc = g(x_lo) + g(x_hi);
  for (int i = 1; i < n; ++i) acc += g(x_lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace qesdx
