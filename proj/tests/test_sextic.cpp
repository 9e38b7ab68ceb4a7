#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "reference_forms.hpp"

using namespace qesdx;

TEST_CASE("three-state sector: energies and monic factors in closed form") {
  for (Real s : {0.25, 0.75, 1.0, 2.0}) {
    CAPTURE(s);
    SexticModel m = build_model(0.5, s, 2);
    Spectrum sp = qes_spectrum(m);
    REQUIRE(sp.entries.size() == 3);
    CHECK(sp.deficiency == 0);
    auto want = refs::sector_states_m2(s);
    for (int i = 0; i < 3; ++i) {
      CAPTURE(i);
      CHECK(std::abs(sp.entries[i].energy - want[i].energy) < 1e-10);
      CHECK(poly_equal(sp.entries[i].sector_poly, want[i].poly, 1e-10));
      CHECK(sp.entries[i].nodes == i);
      CHECK(sp.entries[i].physical);
      CHECK(sp.entries[i].residual_norm < 1e-9);
    }
    CHECK(rat_rel_difference(m.V0.rat, refs::base_potential(s, 2)) < 1e-12);
  }
}

TEST_CASE("larger sector keeps the node ladder and passes residuals") {
  Spectrum sp = qes_spectrum(build_model(0.5, 1.0, 4));
  REQUIRE(sp.entries.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(sp.entries[i].nodes == i);
    CHECK(sp.entries[i].physical);
    CHECK(sp.entries[i].residual_norm < 1e-9);
    if (i > 0)
      CHECK(sp.entries[i].energy.real() > sp.entries[i - 1].energy.real());
  }
  // This sector is symmetric about zero.
  CHECK(std::abs(sp.entries[2].energy) < 1e-9);
  CHECK(std::abs(sp.entries[4].energy + sp.entries[0].energy) < 1e-9);
}

TEST_CASE("parameter swap s -> 1 - s preserves the potential") {
  SexticModel m = build_model(0.5, 2.0, 0);
  SexticModel cv = covariant_model(m);
  CHECK(cv.a == doctest::Approx(0.5));
  CHECK(cv.s == doctest::Approx(-1.0));
  CHECK(cv.M == 3);
  CHECK(rat_rel_difference(m.V0.rat, cv.V0.rat) < 1e-12);
}

TEST_CASE("parameter swap needs an integer partner size") {
  SexticModel m = build_model(0.5, 0.25, 2);  // M + 2s - 1 = 1.5
  CHECK_THROWS_AS((void)covariant_model(m), DomainError);
}

TEST_CASE("defective partner sector degrades to a deficiency count") {
  Spectrum sp = qes_spectrum(covariant_model(build_model(0.5, 2.0, 0)));
  CHECK(sp.entries.size() == 3);
  CHECK(sp.deficiency == 1);
  CHECK(sp.raw_eigenvalues.size() == 4);
}

TEST_CASE("conjugate pair of the swapped sector") {
  SexticModel m = build_model(0.5, 2.0, 0);
  auto pairs = complex_solutions(m);
  REQUIRE(pairs.size() == 1);
  const Real e = 4.0 * std::sqrt(5.0);
  CHECK(std::abs(pairs[0].minus.energy - Cplx(0.0, -e)) < 1e-9);
  CHECK(std::abs(pairs[0].plus.energy - Cplx(0.0, e)) < 1e-9);
  // Monic cubic factor; the partner is its coefficient-wise conjugate.
  const Real h = 2.0 * std::sqrt(5.0);
  PolyC want{{Cplx(0.0, -2.0 * h), Cplx(-10.0), Cplx(0.0, h), Cplx(1.0)}};
  CHECK(poly_equal(pairs[0].minus.sector_poly, want, 1e-9));
  CHECK(poly_equal(pairs[0].plus.sector_poly, poly_conj(want), 1e-9));
  CHECK(!pairs[0].minus.physical);
  CHECK(!pairs[0].plus.physical);
  // Both satisfy the original equation exactly, not just the swapped one.
  CHECK(residual(m.V0.rat, pairs[0].minus.energy, pairs[0].minus.wave).pass);
  CHECK(residual(m.V0.rat, pairs[0].plus.energy, pairs[0].plus.wave).pass);
}

TEST_CASE("one-state sector closes in elementary form") {
  // E^2 = 32 a s and the single factor root sits at 8 s / E.
  for (Real s : {0.5, 2.0, 3.0}) {
    CAPTURE(s);
    SexticModel m = build_model(0.5, s, 1);
    Spectrum sp = qes_spectrum(m);
    REQUIRE(sp.entries.size() == 2);
    const Real e = std::sqrt(32.0 * 0.5 * s);
    CHECK(std::abs(sp.entries[0].energy - Cplx(-e)) < 1e-10);
    CHECK(std::abs(sp.entries[1].energy - Cplx(e)) < 1e-10);
    for (const auto& st : sp.entries) {
      auto roots = bethe_roots(st);
      REQUIRE(roots.size() == 1);
      CHECK(std::abs(roots[0] - Cplx(8.0 * s) / st.energy) < 1e-10);
      BetheReport br = verify_bethe_identity(m, st.energy, roots);
      CHECK(br.max_residual_ordered < 1e-10);
    }
  }
}

TEST_CASE("root-sum identity: ordered pairs vanish, unordered do not") {
  SexticModel m = build_model(0.5, 2.0, 2);
  Spectrum sp = qes_spectrum(m);
  auto roots = bethe_roots(sp.entries[0]);
  REQUIRE(roots.size() == 2);
  CHECK(std::abs(roots[0] - Cplx(-4.0)) < 1e-9);
  CHECK(std::abs(roots[1] - Cplx(-2.0)) < 1e-9);
  BetheReport br = verify_bethe_identity(m, sp.entries[0].energy, roots);
  CHECK(br.max_residual_ordered < 1e-10);
  CHECK(br.max_residual_unordered > 1e-2);
  MESSAGE("two-root sample: ordered residual ", br.max_residual_ordered,
          ", unordered residual ", br.max_residual_unordered);
}

TEST_CASE("model construction validates its inputs") {
  CHECK_THROWS_AS((void)build_model(0.5, 2.0, -1), DomainError);
  CHECK_THROWS_AS((void)build_model(0.0, 2.0, 1), DomainError);
}
