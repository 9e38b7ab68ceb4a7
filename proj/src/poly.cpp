#include "qesdx/poly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace qesdx {

Real PolyC::max_mag() const {
  Real m = 0.0;
  for (const auto& v : c) m = std::max(m, std::abs(v));
  return m;
}

Cplx PolyC::eval(Cplx t) const {
  Cplx acc(0.0);
  for (size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
  return acc;
}

void PolyC::canonicalize(Real zero_rel) {
  const Real m = max_mag();
  if (m == 0.0) {
    c.clear();
    return;
  }
  const Real floor = zero_rel * m;
  for (auto& v : c) {
    Real re = v.real(), im = v.imag();
    if (std::abs(re) < floor) re = 0.0;
    if (std::abs(im) < floor) im = 0.0;
    v = Cplx(re, im);
  }
  while (!c.empty() && c.back() == Cplx(0.0)) c.pop_back();
}

PolyC poly_add(const PolyC& p, const PolyC& q) {
  std::vector<Cplx> out(std::max(p.c.size(), q.c.size()), Cplx(0.0));
  for (size_t i = 0; i < p.c.size(); ++i) out[i] += p.c[i];
  for (size_t i = 0; i < q.c.size(); ++i) out[i] += q.c[i];
  return PolyC(std::move(out));
}

PolyC poly_sub(const PolyC& p, const PolyC& q) { return poly_add(p, poly_scale(q, Cplx(-1.0))); }

PolyC poly_mul(const PolyC& p, const PolyC& q) {
  if (p.is_zero() || q.is_zero()) return PolyC{};
  std::vector<Cplx> out(p.c.size() + q.c.size() - 1, Cplx(0.0));
  for (size_t i = 0; i < p.c.size(); ++i)
    for (size_t j = 0; j < q.c.size(); ++j) out[i + j] += p.c[i] * q.c[j];
  return PolyC(std::move(out));
}

PolyC poly_scale(const PolyC& p, Cplx s) {
  if (s == Cplx(0.0)) return PolyC{};
  std::vector<Cplx> out = p.c;
  for (auto& v : out) v *= s;
  return PolyC(std::move(out));
}

PolyC poly_derivative(const PolyC& p) {
  if (p.c.size() <= 1) return PolyC{};
  std::vector<Cplx> out(p.c.size() - 1);
  for (size_t i = 1; i < p.c.size(); ++i) out[i - 1] = Real(i) * p.c[i];
  return PolyC(std::move(out));
}

PolyC poly_conj(const PolyC& p) {
  std::vector<Cplx> out = p.c;
  for (auto& v : out) v = std::conj(v);
  return PolyC(std::move(out));
}

PolyC poly_shift_up(const PolyC& p, int k) {
  if (p.is_zero() || k == 0) return p;
  std::vector<Cplx> out(p.c.size() + static_cast<size_t>(k), Cplx(0.0));
  for (size_t i = 0; i < p.c.size(); ++i) out[i + static_cast<size_t>(k)] = p.c[i];
  return PolyC(std::move(out));
}

bool poly_equal(const PolyC& p, const PolyC& q, Real tol) {
  const Real scale = std::max({p.max_mag(), q.max_mag(), Real(1.0)});
  const int n = std::max(p.degree(), q.degree());
  for (int i = 0; i <= n; ++i)
    if (std::abs(p.at(i) - q.at(i)) > tol * scale) return false;
  return true;
}

namespace {

// One or two Newton steps per root; skipped when the derivative underflows so
// clustered roots are not thrown off their companion estimates.
Cplx newton_polish(const PolyC& p, const PolyC& dp, Cplx r) {
  const Real scale = std::max(p.max_mag(), Real(1.0));
  for (int it = 0; it < 2; ++it) {
    const Cplx f = p.eval(r);
    const Cplx g = dp.eval(r);
    if (std::abs(g) < 1e-8 * scale) break;
    const Cplx step = f / g;
    if (std::abs(step) > 0.1 * (1.0 + std::abs(r))) break;
    r -= step;
  }
  return r;
}

}  // namespace

std::vector<Cplx> poly_roots(const PolyC& p) {
  if (p.degree() < 1) throw DomainError("poly_roots: degree < 1 polynomial has no root set");

  // Exact zero roots first.
  size_t low = 0;
  while (low < p.c.size() && p.c[low] == Cplx(0.0)) ++low;
  std::vector<Cplx> roots(low, Cplx(0.0));

  std::vector<Cplx> body(p.c.begin() + static_cast<long>(low), p.c.end());
  const int d = static_cast<int>(body.size()) - 1;
  if (d >= 1) {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    const Cplx lead = body.back();
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -body[static_cast<size_t>(i)] / lead;
    for (int i = 1; i < d; ++i) comp(i, i - 1) = Cplx(1.0);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
      throw NumericalError("poly_roots: companion eigenvalue iteration failed");
    PolyC bp;
    bp.c = body;
    PolyC dbp = poly_derivative(bp);
    for (int i = 0; i < d; ++i) roots.push_back(newton_polish(bp, dbp, es.eigenvalues()(i)));
  }

  std::sort(roots.begin(), roots.end(), [](const Cplx& x, const Cplx& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return roots;
}

PolyC roots_to_poly(const std::vector<Cplx>& roots) {
  PolyC acc = PolyC::identity();
  for (const auto& r : roots) acc = poly_mul(acc, PolyC{{-r, Cplx(1.0)}});
  return acc;
}

std::vector<RootCluster> cluster_roots(const std::vector<Cplx>& roots, Real radius) {
  std::vector<RootCluster> out;
  std::vector<Cplx> sums;
  for (const auto& r : roots) {
    bool merged = false;
    for (size_t i = 0; i < out.size(); ++i) {
      if (std::abs(r - out[i].location) <= radius) {
        sums[i] += r;
        out[i].multiplicity += 1;
        out[i].location = sums[i] / Real(out[i].multiplicity);
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.push_back({r, 1});
      sums.push_back(r);
    }
  }
  return out;
}

std::vector<RootCluster> polished_clusters(const PolyC& p) {
  std::vector<RootCluster> out;
  if (p.degree() < 1) return out;
  std::vector<Cplx> roots = poly_roots(p);
  Real rmax = 0.0;
  for (const auto& r : roots) rmax = std::max(rmax, std::abs(r));
  out = cluster_roots(roots, 1e-5 * (1.0 + rmax));
  for (auto& cl : out) {
    if (cl.multiplicity < 2) continue;
    // A multiplicity-m mean is only accurate to the m-th root of machine
    // precision; the (m-1)-th derivative turns it into a simple root.
    PolyC q = p;
    for (int i = 1; i < cl.multiplicity; ++i) q = poly_derivative(q);
    PolyC dq = poly_derivative(q);
    Cplx z = cl.location;
    for (int it = 0; it < 16; ++it) {
      Cplx f = q.eval(z);
      Cplx df = dq.eval(z);
      if (std::abs(df) < 1e-300) break;
      Cplx step = f / df;
      z -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    if (std::abs(z - cl.location) <= 1e-5 * (1.0 + std::abs(cl.location)))
      cl.location = z;
  }
  return out;
}

}  // namespace qesdx
