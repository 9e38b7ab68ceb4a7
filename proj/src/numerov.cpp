#include "qesdx/numerov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "qesdx/oracle.hpp"

namespace qesdx {

namespace {

struct Sweeper {
  std::vector<Real> x;
  std::vector<Real> v;
  Real h;
  Real sigma;
  Real tail_a;

  // y'' = (V - E) y stepped with the three-point Numerov stencil.
  // Returns the node count of the outward solution; with m_cap >= 2 stops
  // there and captures the pair (y[m_cap], y[m_cap + 1]) at a shared scale.
  int outward(Real E, int m_cap, Real* ym, Real* ym1) const {
    const int n = static_cast<int>(x.size());
    auto u = [&](int i) { return 1.0 - h * h * (v[i] - E) / 12.0; };
    Real y0 = std::pow(x[0], sigma);
    Real y1 = std::pow(x[1], sigma);
    int nodes = 0;
    for (int i = 1; i + 1 < n; ++i) {
      Real y2 = (2.0 * y1 * (1.0 + 5.0 * h * h * (v[i] - E) / 12.0) -
                 y0 * u(i - 1)) /
                u(i + 1);
      if (y1 != 0.0 && y2 != 0.0 && (y1 > 0) != (y2 > 0)) ++nodes;
      y0 = y1;
      y1 = y2;
      if (std::abs(y0) > 1e150 || std::abs(y1) > 1e150) {
        y0 *= 1e-150;
        y1 *= 1e-150;
      }
      if (i == m_cap) {  // y0 = y[i], y1 = y[i+1], consistently scaled
        *ym = y0;
        *ym1 = y1;
        break;
      }
    }
    return nodes;
  }

  void inward(Real E, int m, Real* ym, Real* ym1) const {
    const int n = static_cast<int>(x.size());
    auto u = [&](int i) { return 1.0 - h * h * (v[i] - E) / 12.0; };
    Real y1 = 1.0;  // at x[n-1]
    Real y0 = std::exp(tail_a * (std::pow(x[n - 1], 4) - std::pow(x[n - 2], 4)) / 4.0);
    for (int i = n - 2; i > 0; --i) {
      Real y2 = (2.0 * y0 * (1.0 + 5.0 * h * h * (v[i] - E) / 12.0) -
                 y1 * u(i + 1)) /
                u(i - 1);
      y1 = y0;
      y0 = y2;
      if (std::abs(y0) > 1e150 || std::abs(y1) > 1e150) {
        y0 *= 1e-150;
        y1 *= 1e-150;
      }
      if (i - 1 == m) {  // y0 = y[m], y1 = y[m+1], consistently scaled
        *ym = y0;
        *ym1 = y1;
        return;
      }
    }
    *ym = y0;
    *ym1 = y1;
  }

  int turning_index(Real E) const {
    const int n = static_cast<int>(x.size());
    for (int i = n - 1; i >= 0; --i)
      if (v[i] <= E) return std::min(std::max(i, 2), n - 3);
    return n / 2;
  }

  Real defect(Real E) const {
    int m = turning_index(E);
    Real om = 0, om1 = 0, im = 0, im1 = 0;
    outward(E, m, &om, &om1);
    inward(E, m, &im, &im1);
    Real d = om * im1 - om1 * im;
    Real scale = std::abs(om * im1) + std::abs(om1 * im) + 1e-300;
    return d / scale;
  }

  int nodes(Real E) const { return outward(E, -1, nullptr, nullptr); }
};

}  // namespace

NumerovResult numerov_spectrum(const RationalPotential& V,
                               const NumerovConfig& cfg, const Tolerances& tol) {
  if (!realness_check(V.rat, tol))
    throw DomainError("numerov_spectrum: potential is not real on the half line");
  Real a2 = V.sextic_coefficient().real();
  if (!(a2 > 0.0))
    throw DomainError("numerov_spectrum: potential lacks a confining sextic tail");
  Real tail_a = std::sqrt(a2);

  Sweeper sw;
  sw.tail_a = tail_a;
  Real x_max = cfg.x_max > 0.0 ? cfg.x_max : std::pow(240.0 / tail_a, 0.25);
  Real x_min = cfg.x_min;
  if (!(x_min > 0.0) || !(x_max > x_min))
    throw DomainError("numerov_spectrum: bad integration window");

  for (Real tp : pole_scan(V.rat, tol)) {
    Real xp = std::sqrt(tp);
    if (xp >= x_min - 1e-12 && xp <= x_max + 1e-12) {
      std::ostringstream os;
      os << "numerov_spectrum: potential is singular inside the window, pole at x = "
         << xp;
      throw DomainError(os.str());
    }
  }

  int n = std::max(64, static_cast<int>(std::ceil((x_max - x_min) / cfg.step)));
  sw.h = (x_max - x_min) / n;
  sw.x.resize(n + 1);
  sw.v.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    sw.x[i] = x_min + i * sw.h;
    sw.v[i] = V.eval(sw.x[i]).real();
  }

  Real c = V.centrifugal_coefficient().real();
  Real disc = 1.0 + 4.0 * c;
  sw.sigma = disc >= 0.0 ? (1.0 + std::sqrt(disc)) / 2.0 : 0.5;

  NumerovResult out;
  out.x_max = x_max;
  if (!(cfg.e_hi > cfg.e_lo)) return out;

  int n_lo = sw.nodes(cfg.e_lo);
  int n_hi = sw.nodes(cfg.e_hi);
  for (int target = n_lo; target < n_hi; ++target) {
    Real lo = cfg.e_lo, hi = cfg.e_hi;
    // Node phase: shrink to a window holding exactly the target level.
    while (hi - lo > std::max(cfg.bisect_tol, 1e-4)) {
      Real mid = 0.5 * (lo + hi);
      if (sw.nodes(mid) <= target)
        lo = mid;
      else
        hi = mid;
    }
    // Matching phase: sharpen on the sign of the cross defect.
    Real dlo = sw.defect(lo), dhi = sw.defect(hi);
    if ((dlo > 0) != (dhi > 0)) {
      while (hi - lo > cfg.bisect_tol) {
        Real mid = 0.5 * (lo + hi);
        Real dm = sw.defect(mid);
        if ((dm > 0) == (dlo > 0)) {
          lo = mid;
          dlo = dm;
        } else {
          hi = mid;
        }
      }
    } else {
      while (hi - lo > cfg.bisect_tol) {
        Real mid = 0.5 * (lo + hi);
        if (sw.nodes(mid) <= target)
          lo = mid;
        else
          hi = mid;
      }
    }
    out.levels.push_back({0.5 * (lo + hi), target});
  }
  return out;
}

}  // namespace qesdx
