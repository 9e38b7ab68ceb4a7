// Acceptance gate: one line per criterion, nonzero exit when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qesdx/cli.hpp"
#include "qesdx/numerov.hpp"
#include "reference_forms.hpp"

using namespace qesdx;

namespace {

int failures = 0;

void report(int idx, const char* what, bool ok) {
  std::printf("%s  %2d  %s\n", ok ? "PASS" : "FAIL", idx, what);
  if (!ok) ++failures;
}

bool grid_match(const RationalPotential& got, const RationalT& want, Real tol_v) {
  for (int i = 0; i < 40; ++i) {
    Real x = 0.3 + i * (3.0 - 0.3) / 39.0;
    Cplx w = want.eval(Cplx(x * x));
    if (std::abs(got.eval(x) - w) > tol_v * (1.0 + std::abs(w))) return false;
  }
  return true;
}

}  // namespace

int main() {
  Real worst_residual = 0.0;
  auto track = [&](const SpectralEntry& e) {
    worst_residual = std::max(worst_residual, e.residual_norm);
  };

  // 1. Closed-form spectrum of the three-state sector at four tail exponents.
  bool c1 = true;
  for (Real s : {0.25, 0.75, 1.0, 2.0}) {
    Spectrum sp = qes_spectrum(build_model(0.5, s, 2));
    auto want = refs::sector_states_m2(s);
    if (sp.entries.size() != 3) { c1 = false; continue; }
    for (int i = 0; i < 3; ++i) {
      track(sp.entries[i]);
      c1 = c1 && std::abs(sp.entries[i].energy - want[i].energy) < 1e-10 &&
           poly_equal(sp.entries[i].sector_poly, want[i].poly, 1e-10);
    }
  }
  report(1, "sector energies and monic factors match closed forms (1e-10)", c1);

  // 2. Two-step ladder at s = 2: middle potential, carried states, final
  //    ground state, classification, and one-step agreement.
  SexticModel m2 = build_model(0.5, 2.0, 2);
  Spectrum sp2 = qes_spectrum(m2);
  ReducibleChain rc2 = reducible_chain(m2);
  for (const auto& e : rc2.intermediate) track(e);
  for (const auto& e : rc2.final_states) track(e);
  bool c2 = rat_rel_difference(rc2.op0.V_out.rat,
                               refs::intermediate_after_lowest_m2(2.0)) < 1e-9;
  c2 = c2 && refs::match_up_to_scale(rc2.intermediate[0].wave,
                                     refs::phi_mid_m2(2.0)) < 1e-9;
  c2 = c2 && refs::match_up_to_scale(rc2.intermediate[1].wave,
                                     refs::phi_top_m2(2.0)) < 1e-9;
  c2 = c2 && refs::match_up_to_scale(rc2.final_states[0].wave,
                                     refs::chi_after_two_lowest_m2(2.0)) < 1e-9;
  ChainReport cls01 =
      classify_chain(m2.V0, sp2.entries[0].wave, sp2.entries[1].wave, sp2.entries);
  c2 = c2 && cls01.kind == ChainKind::Reducible;
  c2 = c2 && rat_rel_difference(rc2.direct.V_out.rat, rc2.V2.rat) < 1e-9;
  report(2, "ladder at s=2: middle potential, states, one-step agreement (1e-9)", c2);

  // 3. Final potential closed form where its short 1/x^2 term is consistent,
  //    and the composition-forced coefficient elsewhere.
  bool c3 = true;
  for (Real s : {0.25, 0.75}) {
    ReducibleChain rc = reducible_chain(build_model(0.5, s, 2));
    for (const auto& e : rc.intermediate) track(e);
    for (const auto& e : rc.final_states) track(e);
    c3 = c3 && grid_match(rc.V2, refs::final_after_two_lowest_m2(s), 1e-9);
  }
  c3 = c3 && std::abs(rc2.V2.centrifugal_coefficient() - Cplx(24.75)) < 1e-9;
  report(3, "final potential closed form on grid; 1/x^2 coefficient 24.75 at s=2", c3);

  // 4. Top-pair chain at s = 2: singular middle, regular end, carried ground
  //    state.
  ChainReport t1 =
      classify_chain(m2.V0, sp2.entries[1].wave, sp2.entries[2].wave, sp2.entries);
  for (const auto& e : t1.mapped) track(e);
  bool c4 = t1.kind == ChainKind::IrreducibleType1;
  bool saw2 = false, saw4 = false;
  for (Real p : t1.V1_poles) {
    saw2 = saw2 || std::abs(p - 2.0) < 1e-8;
    saw4 = saw4 || std::abs(p - 4.0) < 1e-8;
  }
  c4 = c4 && saw2 && saw4 && t1.V2_poles.empty();
  c4 = c4 && t1.mapped.size() == 1 &&
       refs::match_up_to_scale(t1.mapped[0].wave,
                               refs::chi_after_top_pair_m2(2.0)) < 1e-9;
  report(4, "top-pair chain: singular middle {2,4}, regular end, ground state", c4);

  // 5. Conjugate pair route at s = 2, M = 0.
  SexticModel m0 = build_model(0.5, 2.0, 0);
  SexticModel cv = covariant_model(m0);
  bool c5 = cv.s == -1.0 && cv.M == 3;
  auto pairs = complex_solutions(m0);
  const Real e5 = 4.0 * std::sqrt(5.0);
  c5 = c5 && pairs.size() == 1 &&
       std::abs(pairs[0].minus.energy - Cplx(0.0, -e5)) < 1e-9 &&
       std::abs(pairs[0].plus.energy - Cplx(0.0, e5)) < 1e-9;
  if (c5) {
    track(pairs[0].minus);
    track(pairs[0].plus);
    ChainReport t2 = classify_chain(m0.V0, pairs[0].minus.wave,
                                    pairs[0].plus.wave);
    c5 = c5 && t2.kind == ChainKind::IrreducibleType2;
    c5 = c5 && realness_check(t2.V2.rat);
    c5 = c5 && rat_rel_difference(t2.V2.rat,
                                  refs::conjugate_pair_partner_potential()) < 1e-9;
    SecondOrderOp so = second_order(m0.V0, pairs[0].minus.wave,
                                    pairs[0].plus.wave);
    Spectrum sp0 = qes_spectrum(m0);
    track(sp0.entries[0]);
    QuasiWave img = apply_second_order(so, sp0.entries[0].wave);
    c5 = c5 && refs::match_up_to_scale(img, refs::conjugate_pair_partner_state()) < 1e-9;
    c5 = c5 && residual(t2.V2.rat, Cplx(0.0), img).pass;
  }
  report(5, "conjugate pair: energies, real end potential, carried state (1e-9)", c5);

  // 6. Every state touched above passes the algebraic residual check.
  report(6, "all constructed states keep residuals below 1e-9",
         worst_residual < 1e-9);

  // 7. Factorization identities for every first-order step, plus the
  //    composition shift on the carried states.
  bool c7 = true;
  for (const FirstOrderOp* op : {&rc2.op0, &rc2.op1}) {
    FactorizationReport fr =
        factorization_check(op->W, op->alpha, op->V_in.rat, op->V_out.rat);
    c7 = c7 && fr.pass;
    RationalT wp = superpotential_derivative(op->W);
    for (int i = 0; i < 40 && c7; ++i) {
      Real x = 0.3 + i * (3.0 - 0.3) / 39.0;
      Cplx w = op->W.eval(x);
      Cplx dw = wp.eval(Cplx(x * x));
      Real scale = 1.0 + std::abs(op->V_in.eval(x)) + std::abs(w * w);
      c7 = c7 && std::abs(w * w - dw + op->alpha - op->V_in.eval(x)) < 1e-8 * scale;
      c7 = c7 && std::abs(w * w + dw + op->alpha - op->V_out.eval(x)) < 1e-8 * scale;
    }
  }
  for (int n : {1, 2}) {
    QuasiWave up = apply_first_order(rc2.op0, sp2.entries[n].wave);
    QuasiWave back = apply_adjoint(rc2.op0, up);
    auto ratio = qw_ratio(sp2.entries[n].wave, back);
    Cplx want = sp2.entries[n].energy - rc2.op0.alpha;
    c7 = c7 && ratio.has_value() &&
         std::abs(*ratio - want) < 1e-8 * (1.0 + std::abs(want));
  }
  report(7, "factorization identities on grid (1e-8) and adjoint shift", c7);

  // 8. Intertwining for five random members of the closed family per map.
  bool c8 = true;
  std::mt19937 rng(777);
  std::uniform_real_distribution<Real> coef(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    QuasiWave f = qw_scale(sp2.entries[0].wave, Cplx(coef(rng), coef(rng)));
    f = qw_add(f, qw_scale(sp2.entries[1].wave, Cplx(coef(rng), coef(rng))));
    f = qw_add(f, qw_scale(sp2.entries[2].wave, Cplx(coef(rng), coef(rng))));
    IntertwineReport i0 =
        intertwine_check(rc2.op0.W, rc2.op0.V_in.rat, rc2.op0.V_out.rat, f);
    IntertwineReport i2 = intertwine_check(rc2.direct.wa, rc2.direct.wb,
                                           rc2.direct.V_in.rat,
                                           rc2.direct.V_out.rat, f);
    c8 = c8 && i0.pass && i0.norm < 1e-9 && i2.pass && i2.norm < 1e-9;
  }
  report(8, "intertwining below 1e-9 on five random family functions per map", c8);

  // 9. Independent shooting oracle: sector containment and two-level deletion.
  auto t0 = std::chrono::steady_clock::now();
  SexticModel m9 = build_model(0.5, 1.0, 2);
  Spectrum sp9 = qes_spectrum(m9);
  ReducibleChain rc9 = reducible_chain(m9);
  NumerovConfig cfg;
  cfg.e_lo = -15.0;
  cfg.e_hi = 25.0;
  NumerovResult base = numerov_spectrum(m9.V0, cfg);
  NumerovResult top = numerov_spectrum(rc9.V2, cfg);
  bool c9 = base.levels.size() >= 3;
  for (int i = 0; i < 3 && c9; ++i)
    c9 = std::abs(base.levels[i].energy - sp9.entries[i].energy.real()) < 1e-4 &&
         base.levels[i].nodes == i;
  c9 = c9 && top.levels.size() + 2 == base.levels.size();
  for (std::size_t i = 0; i < top.levels.size() && c9; ++i)
    c9 = std::abs(top.levels[i].energy - base.levels[i + 2].energy) < 1e-4;
  auto t9 = std::chrono::steady_clock::now();
  c9 = c9 && std::chrono::duration_cast<std::chrono::seconds>(t9 - t0).count() < 30;
  report(9, "shooting oracle: sector contained (1e-4), two levels deleted, <30s", c9);

  // 10. Root-sum identity: elementary one-state closed form; the two-root
  //     sample is recorded under both pairing conventions.
  bool c10 = true;
  for (Real s : {0.5, 2.0, 3.0}) {
    SexticModel m1 = build_model(0.5, s, 1);
    Spectrum s1 = qes_spectrum(m1);
    const Real e = std::sqrt(32.0 * 0.5 * s);
    c10 = c10 && std::abs(s1.entries[0].energy + Cplx(e)) < 1e-10 &&
          std::abs(s1.entries[1].energy - Cplx(e)) < 1e-10;
    for (const auto& st : s1.entries) {
      auto roots = bethe_roots(st);
      c10 = c10 && roots.size() == 1 &&
            std::abs(roots[0] - Cplx(8.0 * s) / st.energy) < 1e-10;
      BetheReport br = verify_bethe_identity(m1, st.energy, roots);
      c10 = c10 && br.max_residual_ordered < 1e-10;
    }
  }
  {
    auto roots = bethe_roots(sp2.entries[0]);
    BetheReport br = verify_bethe_identity(m2, sp2.entries[0].energy, roots);
    std::printf("      two-root sample: ordered %.3e, unordered %.3e\n",
                br.max_residual_ordered, br.max_residual_unordered);
  }
  report(10, "root-sum identity closed form below 1e-10; conventions recorded", c10);

  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  else std::printf("all criteria passed\n");
  return failures ? 1 : 0;
}
