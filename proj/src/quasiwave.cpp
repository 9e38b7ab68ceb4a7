#include "qesdx/quasiwave.hpp"

#include <cmath>

namespace qesdx {

namespace {

// Count exact low-order zero coefficients (canonical polys store true zeros).
int low_zero_count(const PolyC& p) {
  int e = 0;
  while (e < static_cast<int>(p.c.size()) && p.c[static_cast<size_t>(e)] == Cplx(0.0)) ++e;
  return e;
}

PolyC shift_down(const PolyC& p, int e) {
  std::vector<Cplx> out(p.c.begin() + e, p.c.end());
  return PolyC(std::move(out));
}

void require_same_a(const QuasiWave& f, const QuasiWave& g, const char* op) {
  if (std::abs(f.a - g.a) > 1e-12 * (1.0 + std::abs(f.a)))
    throw DomainError(std::string(op) + ": mismatched quartic scale a");
}

}  // namespace

QuasiWave qw_zero() {
  QuasiWave z;
  z.scale = Cplx(0.0);
  z.num = PolyC{};
  z.den = PolyC::identity();
  z.sigma = 0.0;
  z.k = 0;
  return z;
}

QuasiWave qw_canonicalize(QuasiWave q, const Tolerances& tol) {
  if (q.is_zero()) {
    QuasiWave z = qw_zero();
    z.a = q.a;
    return z;
  }
  RationalT r = rat_simplify(RationalT(q.num, q.den), tol);
  if (r.num.is_zero()) {
    QuasiWave z = qw_zero();
    z.a = q.a;
    return z;
  }
  const int en = low_zero_count(r.num);
  if (en > 0) {
    r.num = shift_down(r.num, en);
    q.sigma += 2.0 * en;
  }
  const int ed = low_zero_count(r.den);
  if (ed > 0) {
    r.den = shift_down(r.den, ed);
    q.sigma -= 2.0 * ed;
  }
  const Cplx nl = r.num.lead();
  const Cplx dl = r.den.lead();
  q.scale *= nl / dl;
  q.num = poly_scale(r.num, Cplx(1.0) / nl);
  q.den = poly_scale(r.den, Cplx(1.0) / dl);
  return q;
}

QuasiWave qw_scale(const QuasiWave& f, Cplx s) {
  if (s == Cplx(0.0) || f.is_zero()) {
    QuasiWave z = qw_zero();
    z.a = f.a;
    return z;
  }
  QuasiWave out = f;
  out.scale *= s;
  return out;
}

QuasiWave qw_conj(const QuasiWave& f) {
  QuasiWave out = f;
  out.scale = std::conj(out.scale);
  out.num = poly_conj(out.num);
  out.den = poly_conj(out.den);
  return out;
}

QuasiWave qw_add(const QuasiWave& f, const QuasiWave& g, const Tolerances& tol) {
  if (f.is_zero()) return qw_canonicalize(g, tol);
  if (g.is_zero()) return qw_canonicalize(f, tol);
  require_same_a(f, g, "qw_add");
  if (f.k != g.k) throw DomainError("qw_add: mismatched exp multipliers");
  const Real d = f.sigma - g.sigma;
  const Real m2 = d / 2.0;
  const int m = static_cast<int>(std::lround(m2));
  if (std::abs(m2 - m) > 1e-9) throw DomainError("qw_add: sigma offset is not an even integer");

  // Shift the higher-sigma side into the lower one's prefactor.
  PolyC nf = f.num, ng = g.num;
  Real sigma = f.sigma;
  if (m > 0) {
    nf = poly_shift_up(nf, m);
    sigma = g.sigma;
  } else if (m < 0) {
    ng = poly_shift_up(ng, -m);
  }
  const RationalT sum = rat_add(RationalT(poly_scale(nf, f.scale), f.den),
                                RationalT(poly_scale(ng, g.scale), g.den), tol);
  QuasiWave out;
  out.scale = Cplx(1.0);
  out.a = f.a;
  out.k = f.k;
  out.sigma = sigma;
  out.num = sum.num;
  out.den = sum.den;
  return qw_canonicalize(out, tol);
}

QuasiWave qw_sub(const QuasiWave& f, const QuasiWave& g, const Tolerances& tol) {
  return qw_add(f, qw_scale(g, Cplx(-1.0)), tol);
}

QuasiWave qw_mul(const QuasiWave& f, const QuasiWave& g, const Tolerances& tol) {
  if (f.is_zero() || g.is_zero()) {
    QuasiWave z = qw_zero();
    z.a = f.a;
    return z;
  }
  require_same_a(f, g, "qw_mul");
  QuasiWave out;
  out.scale = f.scale * g.scale;
  out.a = f.a;
  out.k = f.k + g.k;
  out.sigma = f.sigma + g.sigma;
  out.num = poly_mul(f.num, g.num);
  out.den = poly_mul(f.den, g.den);
  return qw_canonicalize(out, tol);
}

QuasiWave qw_div(const QuasiWave& f, const QuasiWave& g, const Tolerances& tol) {
  if (g.is_zero()) throw DomainError("qw_div: division by the zero function");
  if (f.is_zero()) {
    QuasiWave z = qw_zero();
    z.a = f.a;
    return z;
  }
  require_same_a(f, g, "qw_div");
  if (f.k < g.k) throw DomainError("qw_div: quotient leaves the family (negative exp multiplier)");
  QuasiWave out;
  out.scale = f.scale / g.scale;
  out.a = f.a;
  out.k = f.k - g.k;
  out.sigma = f.sigma - g.sigma;
  out.num = poly_mul(f.num, g.den);
  out.den = poly_mul(f.den, g.num);
  return qw_canonicalize(out, tol);
}

QuasiWave qw_mul_rat(const QuasiWave& f, const RationalT& r, const Tolerances& tol) {
  if (f.is_zero() || r.is_zero()) {
    QuasiWave z = qw_zero();
    z.a = f.a;
    return z;
  }
  QuasiWave out = f;
  out.num = poly_mul(out.num, r.num);
  out.den = poly_mul(out.den, r.den);
  return qw_canonicalize(out, tol);
}

QuasiWave qw_derivative(const QuasiWave& f, const Tolerances& tol) {
  if (f.is_zero()) {
    QuasiWave z = qw_zero();
    z.a = f.a;
    return z;
  }
  // d/dx [e^{-k a x^4/4} x^s R(t)] = e^{-k a x^4/4} x^{s-1} [(s - k a t^2) R + 2 t R'].
  const RationalT R(f.num, f.den);
  const PolyC front{{Cplx(f.sigma), Cplx(0.0), Cplx(-Real(f.k) * f.a)}};
  const RationalT bracket = rat_add(rat_mul(RationalT::from_poly(front), R, tol),
                                    rat_mul(RationalT::from_poly(PolyC{{Cplx(0.0), Cplx(2.0)}}),
                                            rat_derivative(R, tol), tol),
                                    tol);
  QuasiWave out;
  out.scale = f.scale;
  out.a = f.a;
  out.k = f.k;
  out.sigma = f.sigma - 1.0;
  out.num = bracket.num;
  out.den = bracket.den;
  return qw_canonicalize(out, tol);
}

QuasiWave qw_wronskian2(const QuasiWave& f, const QuasiWave& g, const Tolerances& tol) {
  if (f.is_zero() || g.is_zero()) {
    QuasiWave z = qw_zero();
    z.a = f.a;
    return z;
  }
  require_same_a(f, g, "qw_wronskian2");
  return qw_sub(qw_mul(f, qw_derivative(g, tol), tol), qw_mul(g, qw_derivative(f, tol), tol),
                tol);
}

QuasiWave qw_wronskian3(const QuasiWave& f, const QuasiWave& g, const QuasiWave& h,
                        const Tolerances& tol) {
  const QuasiWave f1 = qw_derivative(f, tol), g1 = qw_derivative(g, tol),
                  h1 = qw_derivative(h, tol);
  const QuasiWave f2 = qw_derivative(f1, tol), g2 = qw_derivative(g1, tol),
                  h2 = qw_derivative(h1, tol);
  const QuasiWave mf = qw_sub(qw_mul(g1, h2, tol), qw_mul(h1, g2, tol), tol);
  const QuasiWave mg = qw_sub(qw_mul(f1, h2, tol), qw_mul(h1, f2, tol), tol);
  const QuasiWave mh = qw_sub(qw_mul(f1, g2, tol), qw_mul(g1, f2, tol), tol);
  return qw_add(qw_sub(qw_mul(f, mf, tol), qw_mul(g, mg, tol), tol), qw_mul(h, mh, tol), tol);
}

Superpotential qw_log_derivative(const QuasiWave& f, const Tolerances& tol) {
  if (f.is_zero()) throw DomainError("qw_log_derivative: zero function");
  // -f'/f = x * [k a t - sigma/t - 2 (N'/N - D'/D)].
  RationalT g = RationalT::from_poly(PolyC{{Cplx(0.0), Cplx(Real(f.k) * f.a)}});
  g = rat_sub(g, RationalT(PolyC::constant(Cplx(f.sigma)), PolyC{{Cplx(0.0), Cplx(1.0)}}), tol);
  if (f.num.degree() >= 1)
    g = rat_sub(g, rat_scale(RationalT(poly_derivative(f.num), f.num), Cplx(2.0)), tol);
  if (f.den.degree() >= 1)
    g = rat_add(g, rat_scale(RationalT(poly_derivative(f.den), f.den), Cplx(2.0)), tol);
  return Superpotential{g};
}

RationalT superpotential_derivative(const Superpotential& w, const Tolerances& tol) {
  return rat_add(w.g,
                 rat_mul(RationalT::from_poly(PolyC{{Cplx(0.0), Cplx(2.0)}}),
                         rat_derivative(w.g, tol), tol),
                 tol);
}

RationalT superpotential_square(const Superpotential& w, const Tolerances& tol) {
  return rat_mul(RationalT::from_poly(PolyC{{Cplx(0.0), Cplx(1.0)}}), rat_mul(w.g, w.g, tol),
                 tol);
}

Cplx qw_eval(const QuasiWave& f, Real x) {
  if (f.is_zero()) return Cplx(0.0);
  if (x <= 0.0) throw DomainError("qw_eval: domain is x > 0");
  const Cplx t(x * x, 0.0);
  const Cplx d = f.den.eval(t);
  if (std::abs(d) < 1e-300 * std::max(f.den.max_mag(), Real(1.0)))
    throw PoleError("qw_eval at a pole", t);
  const Real expo = -Real(f.k) * f.a * x * x * x * x / 4.0;
  return f.scale * std::exp(expo) * std::pow(x, f.sigma) * f.num.eval(t) / d;
}

std::optional<Cplx> qw_ratio(const QuasiWave& f, const QuasiWave& g, Real tol) {
  if (f.is_zero() || g.is_zero()) return std::nullopt;
  if (std::abs(f.a - g.a) > 1e-12 || f.k != g.k) return std::nullopt;
  if (std::abs(f.sigma - g.sigma) > tol) return std::nullopt;
  if (!poly_equal(f.num, g.num, tol) || !poly_equal(f.den, g.den, tol)) return std::nullopt;
  return g.scale / f.scale;
}

}  // namespace qesdx
