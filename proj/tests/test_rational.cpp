#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qesdx/rational.hpp"

using namespace qesdx;

namespace {

PolyC rp(std::initializer_list<double> cs) {
  PolyC p;
  for (double c : cs) p.c.push_back(Cplx(c));
  p.canonicalize();
  return p;
}

const Cplx kSamples[] = {Cplx(0.37), Cplx(1.21), Cplx(2.9), Cplx(0.5, 0.8)};

void check_pointwise(const RationalT& got, const RationalT& x, const RationalT& y,
                     Cplx (*op)(Cplx, Cplx)) {
  for (Cplx t : kSamples) {
    Cplx want = op(x.eval(t), y.eval(t));
    CHECK(std::abs(got.eval(t) - want) < 1e-10 * (1.0 + std::abs(want)));
  }
}

}  // namespace

TEST_CASE("field operations agree with pointwise arithmetic") {
  RationalT x(rp({1.0, 2.0}), rp({3.0, 0.0, 1.0}));
  RationalT y(rp({-2.0, 0.0, 1.0}), rp({1.0, 1.0}));
  check_pointwise(rat_add(x, y), x, y, +[](Cplx a, Cplx b) { return a + b; });
  check_pointwise(rat_sub(x, y), x, y, +[](Cplx a, Cplx b) { return a - b; });
  check_pointwise(rat_mul(x, y), x, y, +[](Cplx a, Cplx b) { return a * b; });
  check_pointwise(rat_div(x, y), x, y, +[](Cplx a, Cplx b) { return a / b; });
}

TEST_CASE("simplify cancels a shared linear factor") {
  // (t - 1)(t + 2) / (t - 1)(t + 5)
  RationalT r(poly_mul(rp({-1.0, 1.0}), rp({2.0, 1.0})),
              poly_mul(rp({-1.0, 1.0}), rp({5.0, 1.0})));
  RationalT s = rat_simplify(r);
  CHECK(s.num.degree() == 1);
  CHECK(s.den.degree() == 1);
  for (Cplx t : kSamples)
    CHECK(std::abs(s.eval(t) - r.eval(t)) < 1e-10 * (1.0 + std::abs(r.eval(t))));
}

TEST_CASE("simplify cancels repeated factors without losing accuracy") {
  // (t - 2)^2 (t + 1) / (t - 2)^2 (t + 3)^2
  PolyC d2 = poly_mul(rp({-2.0, 1.0}), rp({-2.0, 1.0}));
  RationalT r(poly_mul(d2, rp({1.0, 1.0})),
              poly_mul(d2, poly_mul(rp({3.0, 1.0}), rp({3.0, 1.0}))));
  RationalT s = rat_simplify(r);
  CHECK(s.num.degree() == 1);
  CHECK(s.den.degree() == 2);
  for (Cplx t : kSamples)
    CHECK(std::abs(s.eval(t) - r.eval(t)) < 1e-9 * (1.0 + std::abs(r.eval(t))));
}

TEST_CASE("simplify leaves coprime input alone") {
  RationalT r(rp({1.0, 1.0}), rp({2.0, 1.0}));
  RationalT s = rat_simplify(r);
  CHECK(s.num.degree() == 1);
  CHECK(s.den.degree() == 1);
}

TEST_CASE("evaluation at a denominator root raises PoleError") {
  RationalT r(rp({1.0}), rp({-2.0, 1.0}));
  CHECK_THROWS_AS((void)r.eval(Cplx(2.0)), PoleError);
}

TEST_CASE("derivative matches a central finite difference") {
  RationalT r(rp({1.0, 0.0, 2.0}), rp({4.0, 1.0}));
  RationalT d = rat_derivative(r);
  const double h = 1e-6;
  for (double t : {0.4, 1.3, 2.7}) {
    Cplx fd = (r.eval(Cplx(t + h)) - r.eval(Cplx(t - h))) / Cplx(2.0 * h);
    CHECK(std::abs(d.eval(Cplx(t)) - fd) < 1e-7 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("conjugation flips imaginary coefficients") {
  RationalT r(PolyC{{Cplx(1.0, 1.0)}}, PolyC{{Cplx(0.0, -2.0), Cplx(1.0, 0.0)}});
  RationalT c = rat_conj(r);
  for (double t : {0.6, 1.9}) {
    Cplx want = std::conj(r.eval(Cplx(t)));
    CHECK(std::abs(c.eval(Cplx(t)) - want) < 1e-12);
  }
}

TEST_CASE("rat_equal tolerates representation differences") {
  RationalT a(rp({2.0, 2.0}), rp({4.0}));          // (2t + 2)/4
  RationalT b(rp({0.5, 0.5}), rp({1.0}));          // same function
  CHECK(rat_equal(a, b, 1e-9));
  RationalT c(rp({0.5, 0.6}), rp({1.0}));
  CHECK(!rat_equal(a, c, 1e-9));
}
