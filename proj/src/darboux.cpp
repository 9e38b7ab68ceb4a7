#include "qesdx/darboux.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qesdx {

const char* chain_kind_name(ChainKind k) {
  switch (k) {
    case ChainKind::Reducible: return "Reducible";
    case ChainKind::IrreducibleType1: return "IrreducibleType1";
    case ChainKind::IrreducibleType2: return "IrreducibleType2";
    case ChainKind::Invalid: return "Invalid";
  }
  return "Invalid";
}

namespace {

QuasiWave zero_like(const QuasiWave& f) {
  QuasiWave z = qw_zero();
  z.a = f.a;
  return z;
}

QuasiWave apply_w(const QuasiWave& f, const Superpotential& W,
                  const Tolerances& tol) {
  QuasiWave h = qw_mul_rat(f, W.g, tol);
  if (h.is_zero()) return h;
  h.sigma += 1.0;
  return h;
}

// (ln q)'' as a rational function of t = x^2, from the parts of q directly:
//   -3 k a t - sigma/t + 2 S(num) - 2 S(den),  S(P) = R + 2 t R',  R = P'/P.
RationalT log_second_derivative(const QuasiWave& q, const Tolerances& tol) {
  PolyC t_poly;
  t_poly.c = {Cplx(0.0), Cplx(1.0)};
  auto curvature = [&](const PolyC& p) {
    RationalT r = rat_simplify(RationalT(poly_derivative(p), p), tol);
    RationalT tr = rat_mul(RationalT::from_poly(t_poly), rat_derivative(r, tol), tol);
    return rat_add(r, rat_scale(tr, Cplx(2.0)), tol);
  };
  RationalT out = RationalT::from_poly(
      poly_scale(t_poly, Cplx(-3.0 * q.k * q.a)));
  out = rat_sub(out, RationalT(PolyC::constant(Cplx(q.sigma)), t_poly), tol);
  if (q.num.degree() > 0)
    out = rat_add(out, rat_scale(curvature(q.num), Cplx(2.0)), tol);
  if (q.den.degree() > 0)
    out = rat_sub(out, rat_scale(curvature(q.den), Cplx(2.0)), tol);
  return out;
}

// Eigenvalue of f under -d^2/dx^2 + V, recovered by pointwise division and
// certified afterwards by the coefficient residual.
Cplx infer_eigenvalue(const RationalPotential& V, const QuasiWave& f,
                      const Tolerances& tol) {
  if (f.is_zero())
    throw DomainError("transformation function must be nonzero");
  QuasiWave h = schrodinger_apply(V.rat, f, tol);
  if (h.is_zero()) return Cplx(0.0);
  Cplx best(0.0);
  Real best_mag = -1.0;
  for (int j = 0; j < 7; ++j) {
    Real x = 0.7 + 0.37 * j;
    try {
      Cplx fv = qw_eval(f, x);
      if (std::abs(fv) <= 1e-10) continue;
      if (std::abs(fv) > best_mag) {
        best_mag = std::abs(fv);
        best = qw_eval(h, x) / fv;
      }
    } catch (const PoleError&) {
      continue;
    }
  }
  if (best_mag < 0.0)
    throw NumericalError("could not sample the transformation function");
  return best;
}

SpectralEntry derived_entry(const RationalPotential& V, Cplx E,
                            const QuasiWave& wave, const Tolerances& tol,
                            const char* what) {
  SpectralEntry e;
  e.energy = E;
  e.wave = wave;
  e.sector_poly = wave.num;
  e.nodes = 0;
  if (wave.num.degree() > 0) {
    for (const auto& c : polished_clusters(wave.num)) {
      if (c.location.real() > tol.pole_floor &&
          std::abs(c.location.imag()) < tol.pole_floor && (c.multiplicity % 2))
        ++e.nodes;
    }
  }
  auto rr = residual(V.rat, E, wave, tol);
  if (!rr.pass) throw NumericalError(std::string(what) + ": image fails the residual check");
  e.residual_norm = rr.norm;
  bool real_e = std::abs(E.imag()) <= 1e-9 * (1.0 + std::abs(E));
  e.physical = real_e && normalizable(wave, tol).normalizable;
  return e;
}

}  // namespace

FirstOrderOp first_order(const RationalPotential& V, const QuasiWave& f,
                         Cplx alpha, const Tolerances& tol) {
  auto rr = residual(V.rat, alpha, f, tol);
  if (!rr.pass)
    throw DomainError("first_order: not a transformation function of V at alpha");
  FirstOrderOp op;
  op.W = qw_log_derivative(f, tol);
  op.alpha = alpha;
  op.seed = f;
  op.V_in = V;
  op.V_out = RationalPotential(rat_add(
      V.rat, rat_scale(superpotential_derivative(op.W, tol), Cplx(2.0)), tol));
  auto fact = factorization_check(op.W, alpha, op.V_in.rat, op.V_out.rat, tol);
  if (!fact.pass)
    throw NumericalError("first_order: factorization identities drifted");
  return op;
}

QuasiWave apply_first_order(const FirstOrderOp& op, const QuasiWave& f,
                            const Tolerances& tol) {
  if (f.is_zero()) return zero_like(f);
  // Multiples of the seed span the kernel; the symbolic sum would otherwise
  // leave cancellation dust that no relative normalization can remove.
  if (qw_ratio(f, op.seed).has_value()) return zero_like(f);
  return qw_add(qw_derivative(f, tol), apply_w(f, op.W, tol), tol);
}

QuasiWave apply_adjoint(const FirstOrderOp& op, const QuasiWave& f,
                        const Tolerances& tol) {
  if (f.is_zero()) return zero_like(f);
  return qw_sub(apply_w(f, op.W, tol), qw_derivative(f, tol), tol);
}

SecondOrderOp second_order(const RationalPotential& V, const QuasiWave& wa,
                           const QuasiWave& wb, const Tolerances& tol) {
  SecondOrderOp op;
  op.wa = wa;
  op.wb = wb;
  op.alpha_a = infer_eigenvalue(V, wa, tol);
  op.alpha_b = infer_eigenvalue(V, wb, tol);
  if (!residual(V.rat, op.alpha_a, wa, tol).pass ||
      !residual(V.rat, op.alpha_b, wb, tol).pass)
    throw DomainError("second_order: pair members are not transformation functions of V");
  op.wron = qw_wronskian2(wa, wb, tol);
  if (op.wron.is_zero())
    throw DomainError("second_order: degenerate pair, Wronskian vanishes");
  op.V_in = V;
  op.V_out = RationalPotential(rat_sub(
      V.rat, rat_scale(log_second_derivative(op.wron, tol), Cplx(2.0)), tol));
  return op;
}

QuasiWave apply_second_order(const SecondOrderOp& op, const QuasiWave& f,
                             const Tolerances& tol) {
  if (f.is_zero()) return zero_like(f);
  // A repeated column makes the determinant vanish identically; skip the
  // symbolic expansion so its cancellation dust cannot leak through.
  if (qw_ratio(f, op.wa).has_value() || qw_ratio(f, op.wb).has_value())
    return zero_like(f);
  QuasiWave w3 = qw_wronskian3(op.wa, op.wb, f, tol);
  if (w3.is_zero()) return zero_like(f);
  return qw_div(w3, op.wron, tol);
}

namespace {

// Relative size of L(seed) = seed' + W seed measured against the term scale;
// zero for the seed the operator was built on, up to rounding.
Real annihilation_defect(const FirstOrderOp& op, const QuasiWave& f,
                         const Tolerances& tol) {
  return qw_rel_difference(qw_derivative(f, tol),
                           qw_scale(apply_w(f, op.W, tol), Cplx(-1.0)), tol);
}

}  // namespace

ReducibleChain reducible_chain(const SexticModel& m, const Tolerances& tol) {
  if (m.M < 1)
    throw DomainError("reducible_chain: need a sector with at least two states");
  Spectrum sp = qes_spectrum(m, tol);
  const auto& psi0 = sp.entries[0];
  const auto& psi1 = sp.entries[1];

  ReducibleChain chain;
  chain.op0 = first_order(m.V0, psi0.wave, psi0.energy, tol);
  if (annihilation_defect(chain.op0, psi0.wave, tol) > 1e-10)
    throw NumericalError("reducible_chain: seed state not annihilated");

  for (std::size_t i = 1; i < sp.entries.size(); ++i) {
    QuasiWave phi = apply_first_order(chain.op0, sp.entries[i].wave, tol);
    chain.intermediate.push_back(derived_entry(
        chain.op0.V_out, sp.entries[i].energy, phi, tol, "reducible_chain"));
  }

  chain.op1 = first_order(chain.op0.V_out, chain.intermediate[0].wave,
                          chain.intermediate[0].energy, tol);
  chain.V2 = chain.op1.V_out;
  if (annihilation_defect(chain.op1, chain.intermediate[0].wave, tol) > 1e-10)
    throw NumericalError("reducible_chain: intermediate seed not annihilated");

  for (std::size_t i = 1; i < chain.intermediate.size(); ++i) {
    QuasiWave chi =
        apply_first_order(chain.op1, chain.intermediate[i].wave, tol);
    chain.final_states.push_back(derived_entry(
        chain.V2, chain.intermediate[i].energy, chi, tol, "reducible_chain"));
  }

  chain.direct = second_order(m.V0, psi0.wave, psi1.wave, tol);
  if (rat_rel_difference(chain.direct.V_out.rat, chain.V2.rat, tol) >=
      tol.residual)
    throw NumericalError(
        "reducible_chain: composed potential disagrees with the direct construction");
  return chain;
}

namespace {

bool conjugate_pair(const QuasiWave& wa, const QuasiWave& wb, Cplx ea, Cplx eb,
                    const Tolerances& tol) {
  Real esc = 1.0 + std::abs(ea);
  if (std::abs(ea.imag()) <= tol.realness * esc) return false;
  if (std::abs(std::conj(ea) - eb) > 1e-7 * esc) return false;
  if (wa.k != wb.k || std::abs(wa.sigma - wb.sigma) > 1e-9) return false;
  return poly_equal(poly_conj(wa.num), wb.num, 1e-7) &&
         poly_equal(poly_conj(wa.den), wb.den, 1e-7);
}

}  // namespace

ChainReport classify_chain(const RationalPotential& V0, const QuasiWave& wa,
                           const QuasiWave& wb,
                           const std::vector<SpectralEntry>& sources,
                           const Tolerances& tol) {
  SecondOrderOp op = second_order(V0, wa, wb, tol);
  ChainReport rep;
  rep.alpha_a = op.alpha_a;
  rep.alpha_b = op.alpha_b;
  rep.V2 = op.V_out;
  rep.V2_poles = pole_scan(op.V_out.rat, tol);

  auto intermediate_for = [&](const QuasiWave& seed) {
    Superpotential w = qw_log_derivative(seed, tol);
    return RationalPotential(rat_add(
        V0.rat, rat_scale(superpotential_derivative(w, tol), Cplx(2.0)), tol));
  };
  RationalPotential cand_a = intermediate_for(wa);
  RationalPotential cand_b = intermediate_for(wb);
  bool ok_a = realness_check(cand_a.rat, tol) && pole_scan(cand_a.rat, tol).empty();
  bool ok_b = realness_check(cand_b.rat, tol) && pole_scan(cand_b.rat, tol).empty();

  auto commit = [&](const RationalPotential& v1) {
    rep.V1 = v1;
    rep.V1_real = realness_check(v1.rat, tol);
    rep.V1_poles = pole_scan(v1.rat, tol);
  };

  if (!rep.V2_poles.empty()) {
    rep.kind = ChainKind::Invalid;
    commit(ok_a || !ok_b ? cand_a : cand_b);
  } else if (conjugate_pair(wa, wb, op.alpha_a, op.alpha_b, tol)) {
    rep.kind = ChainKind::IrreducibleType2;
    commit(cand_a);
  } else if (ok_a) {
    rep.kind = ChainKind::Reducible;
    commit(cand_a);
  } else if (ok_b) {
    rep.kind = ChainKind::Reducible;
    commit(cand_b);
  } else {
    rep.kind = ChainKind::IrreducibleType1;
    // Report the decomposition that strips the higher state first.
    commit(op.alpha_b.real() > op.alpha_a.real() ? cand_b : cand_a);
  }

  for (const auto& src : sources) {
    QuasiWave image = apply_second_order(op, src.wave, tol);
    if (image.is_zero()) continue;
    rep.mapped.push_back(
        derived_entry(rep.V2, src.energy, image, tol, "classify_chain"));
  }
  std::sort(rep.mapped.begin(), rep.mapped.end(),
            [](const SpectralEntry& x, const SpectralEntry& y) {
              if (x.energy.real() != y.energy.real())
                return x.energy.real() < y.energy.real();
              return x.energy.imag() < y.energy.imag();
            });
  for (std::size_t i = 0; i < rep.mapped.size(); ++i)
    rep.mapped[i].index = static_cast<int>(i);
  return rep;
}

}  // namespace qesdx
