#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <chrono>
#include <cmath>

#include "doctest.h"
#include "qesdx/darboux.hpp"
#include "qesdx/numerov.hpp"

using namespace qesdx;

namespace {

NumerovConfig window(Real lo, Real hi) {
  NumerovConfig cfg;
  cfg.e_lo = lo;
  cfg.e_hi = hi;
  return cfg;
}

}  // namespace

TEST_CASE("shooting spectrum contains the algebraic sector as lowest levels") {
  SexticModel m = build_model(0.5, 1.0, 2);
  Spectrum sp = qes_spectrum(m);
  NumerovResult nr = numerov_spectrum(m.V0, window(-15.0, 25.0));
  REQUIRE(nr.levels.size() >= 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(nr.levels[i].energy - sp.entries[i].energy.real()) < 1e-4);
    CHECK(nr.levels[i].nodes == i);
  }
  // The window also holds one genuine level above the algebraic sector.
  REQUIRE(nr.levels.size() == 4);
  CHECK(nr.levels[3].energy == doctest::Approx(19.652270).epsilon(1e-4));
  CHECK(nr.levels[3].nodes == 3);
}

TEST_CASE("each ladder step deletes exactly the seeded level") {
  SexticModel m = build_model(0.5, 1.0, 2);
  ReducibleChain rc = reducible_chain(m);
  NumerovConfig cfg = window(-15.0, 25.0);

  NumerovResult base = numerov_spectrum(m.V0, cfg);
  NumerovResult mid = numerov_spectrum(rc.op0.V_out, cfg);
  NumerovResult top = numerov_spectrum(rc.V2, cfg);

  REQUIRE(base.levels.size() == 4);
  REQUIRE(mid.levels.size() == 3);
  REQUIRE(top.levels.size() == 2);
  // The survivors line up level by level, including the one the algebraic
  // sector does not see.
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(mid.levels[i].energy - base.levels[i + 1].energy) < 1e-4);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(top.levels[i].energy - base.levels[i + 2].energy) < 1e-4);
    CHECK(top.levels[i].nodes == i);
  }
}

TEST_CASE("halving the step moves no level by more than 1e-6") {
  SexticModel m = build_model(0.5, 1.0, 2);
  NumerovConfig coarse = window(-15.0, 25.0);
  NumerovConfig fine = coarse;
  fine.step = coarse.step / 2.0;
  NumerovResult a = numerov_spectrum(m.V0, coarse);
  NumerovResult b = numerov_spectrum(m.V0, fine);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t i = 0; i < a.levels.size(); ++i)
    CHECK(std::abs(a.levels[i].energy - b.levels[i].energy) < 1e-6);
}

TEST_CASE("automatic window end follows the quartic stiffness") {
  SexticModel m = build_model(0.5, 1.0, 2);
  NumerovResult nr = numerov_spectrum(m.V0, window(-10.0, 1.0));
  CHECK(nr.x_max == doctest::Approx(std::pow(480.0, 0.25)).epsilon(1e-12));
}

TEST_CASE("a pole inside the window is rejected with its location") {
  SexticModel m = build_model(0.5, 2.0, 2);
  Spectrum sp = qes_spectrum(m);
  // Factoring through the middle state puts poles on the half line.
  ChainReport rep = classify_chain(m.V0, sp.entries[1].wave, sp.entries[2].wave);
  REQUIRE(!rep.V1_poles.empty());
  try {
    (void)numerov_spectrum(rep.V1, window(-15.0, 15.0));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("pole at x") != std::string::npos);
  }
}

TEST_CASE("full scan stays fast enough for interactive use") {
  SexticModel m = build_model(0.5, 1.0, 2);
  auto t0 = std::chrono::steady_clock::now();
  (void)numerov_spectrum(m.V0, window(-15.0, 25.0));
  auto t1 = std::chrono::steady_clock::now();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0);
  CHECK(ms.count() < 5000);
}
