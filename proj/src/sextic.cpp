#include "qesdx/sextic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace qesdx {

SexticModel build_model(Real a, Real s, int M) {
  if (!(a > 0.0)) throw DomainError("build_model: a must be positive");
  if (M < 0) throw DomainError("build_model: M must be nonnegative");
  SexticModel m;
  m.a = a;
  m.s = s;
  m.M = M;
  PolyC body;  // a^2 t^3 - 2a(2M + 2s + 1) t
  body.c = {Cplx(0.0), Cplx(-2.0 * a * (2.0 * M + 2.0 * s + 1.0)), Cplx(0.0),
            Cplx(a * a)};
  body.canonicalize();
  Cplx c0(4.0 * (s - 0.25) * (s - 0.75));
  RationalT core = RationalT::from_poly(body);
  if (std::abs(c0) > 0.0) {
    PolyC t_den;
    t_den.c = {Cplx(0.0), Cplx(1.0)};
    core = rat_add(core, RationalT(PolyC::constant(c0), t_den));
  }
  m.V0 = RationalPotential(core);
  return m;
}

namespace {

int odd_positive_roots(const PolyC& p, const Tolerances& tol) {
  if (p.degree() < 1) return 0;
  int n = 0;
  for (const auto& c : polished_clusters(p)) {
    if (c.location.real() > tol.pole_floor &&
        std::abs(c.location.imag()) < tol.pole_floor && (c.multiplicity % 2))
      ++n;
  }
  return n;
}

SpectralEntry make_entry(const SexticModel& m, Cplx E, const PolyC& sector,
                         const Tolerances& tol) {
  SpectralEntry e;
  e.energy = E;
  e.sector_poly = sector;
  QuasiWave w;
  w.scale = Cplx(1.0);
  w.a = m.a;
  w.k = 1;
  w.sigma = 2.0 * m.s - 0.5;
  w.num = sector;
  w.den = PolyC::identity();
  e.wave = qw_canonicalize(w, tol);
  e.nodes = odd_positive_roots(sector, tol);
  auto rr = residual(m.V0.rat, E, e.wave, tol);
  if (!rr.pass)
    throw NumericalError("qes_spectrum: state fails the residual check");
  e.residual_norm = rr.norm;
  bool real_e = std::abs(E.imag()) <= 1e-9 * (1.0 + std::abs(E));
  e.physical = real_e && normalizable(e.wave, tol).normalizable;
  return e;
}

}  // namespace

Spectrum qes_spectrum(const SexticModel& m, const Tolerances& tol) {
  const int n = m.M + 1;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  // Three-term closure of 4 t P'' + (8 s - 4 a t^2) P' + (4 a M t + E) P = 0
  // on coefficients c_0..c_M:
  //   4 (j+1)(j+2s) c_{j+1} + E c_j + 4 a (M - j + 1) c_{j-1} = 0.
  for (int j = 0; j + 1 < n; ++j)
    A(j, j + 1) = Cplx(-4.0 * (j + 1.0) * (j + 2.0 * m.s));
  for (int j = 1; j < n; ++j) A(j, j - 1) = Cplx(-4.0 * m.a * (m.M - j + 1.0));

  // The closure matrix is tridiagonal with zero diagonal, so its
  // characteristic polynomial follows the principal-minor recurrence
  //   D_k = lambda D_{k-1} - A(k-2,k-1) A(k-1,k-2) D_{k-2},
  // with exactly representable coefficients for moderate sizes.  Roots of
  // D_n are the sector energies; a vanishing off-diagonal product keeps the
  // low-order coefficients exact, which matters for defective sectors.
  PolyC lambda;
  lambda.c = {Cplx(0.0), Cplx(1.0)};
  PolyC d_prev = PolyC::constant(Cplx(1.0));
  PolyC d_cur = lambda;
  for (int k = 2; k <= n; ++k) {
    Cplx off = A(k - 2, k - 1) * A(k - 1, k - 2);
    PolyC next = poly_sub(poly_mul(lambda, d_cur), poly_scale(d_prev, off));
    d_prev = d_cur;
    d_cur = next;
  }

  Spectrum sp;
  sp.raw_eigenvalues = poly_roots(d_cur);
  Real emax = 0.0;
  for (const auto& lam : sp.raw_eigenvalues) emax = std::max(emax, std::abs(lam));

  // A defective multiple root splits by roughly the square root of machine
  // precision times the coefficient scale; the cluster radius must absorb it.
  std::vector<RootCluster> clusters =
      cluster_roots(sp.raw_eigenvalues, 1e-6 * (1.0 + emax));

  for (const auto& c : clusters) {
    Eigen::MatrixXcd B = A - c.location * Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeFullV);
    Real smax = svd.singularValues()(0);
    int null_dim = 0;
    for (int i = 0; i < n; ++i)
      if (svd.singularValues()(i) <= 1e-8 * std::max(smax, Real(1.0)))
        ++null_dim;
    if (null_dim == 0) {
      // A defective eigenvalue whose location could not be pinned down well
      // enough to expose the null direction: count the whole cluster as lost.
      sp.deficiency += c.multiplicity;
      continue;
    }
    if (null_dim < c.multiplicity) sp.deficiency += c.multiplicity - null_dim;
    for (int v = 0; v < null_dim; ++v) {
      Eigen::VectorXcd vec = svd.matrixV().col(n - 1 - v);
      PolyC sector;
      sector.c.resize(n);
      for (int i = 0; i < n; ++i) sector.c[i] = vec(i);
      sector.canonicalize();
      if (sector.is_zero())
        throw NumericalError("qes_spectrum: null vector collapsed to zero");
      sector = poly_scale(sector, Cplx(1.0) / sector.lead());
      try {
        sp.entries.push_back(make_entry(m, c.location, sector, tol));
      } catch (const NumericalError&) {
        if (c.multiplicity > 1) {
          ++sp.deficiency;  // uncertifiable direction of a defective cluster
          continue;
        }
        throw;
      }
    }
  }

  std::sort(sp.entries.begin(), sp.entries.end(),
            [](const SpectralEntry& x, const SpectralEntry& y) {
              if (x.energy.real() != y.energy.real())
                return x.energy.real() < y.energy.real();
              return x.energy.imag() < y.energy.imag();
            });
  for (std::size_t i = 0; i < sp.entries.size(); ++i)
    sp.entries[i].index = static_cast<int>(i);
  return sp;
}

SexticModel covariant_model(const SexticModel& m) {
  Real s2 = 1.0 - m.s;
  Real m2 = m.M + 2.0 * m.s - 1.0;
  Real m2_round = std::round(m2);
  if (std::abs(m2 - m2_round) > 1e-9)
    throw DomainError("covariant_model: partner sector size is not an integer");
  if (m2_round < -0.5)
    throw DomainError("covariant_model: partner sector size is negative");
  SexticModel out = build_model(m.a, s2, static_cast<int>(m2_round));
  if (rat_rel_difference(out.V0.rat, m.V0.rat) > 1e-12)
    throw NumericalError("covariant_model: potential changed under the swap");
  return out;
}

std::vector<ComplexPair> complex_solutions(const SexticModel& m,
                                           const Tolerances& tol) {
  SexticModel mc = covariant_model(m);
  Spectrum sp = qes_spectrum(mc, tol);
  std::vector<ComplexPair> out;
  for (std::size_t i = 0; i < sp.entries.size(); ++i) {
    const auto& e = sp.entries[i];
    Real im_tol = 1e-9 * (1.0 + std::abs(e.energy));
    if (e.energy.imag() >= -im_tol) continue;  // want the Im E < 0 member
    ComplexPair pair;
    pair.minus = e;
    pair.minus.physical = false;
    // Partner carries the literal conjugate data so the pair is exact.
    pair.plus = e;
    pair.plus.energy = std::conj(e.energy);
    pair.plus.wave = qw_conj(e.wave);
    pair.plus.sector_poly = poly_conj(e.sector_poly);
    pair.plus.physical = false;
    auto rr = residual(m.V0.rat, pair.plus.energy, pair.plus.wave, tol);
    if (!rr.pass)
      throw NumericalError("complex_solutions: conjugate fails the residual");
    pair.plus.residual_norm = rr.norm;
    out.push_back(std::move(pair));
  }
  std::sort(out.begin(), out.end(), [](const ComplexPair& x, const ComplexPair& y) {
    return std::abs(x.minus.energy.imag()) < std::abs(y.minus.energy.imag());
  });
  return out;
}

std::vector<Cplx> bethe_roots(const SpectralEntry& e) {
  if (e.sector_poly.degree() < 1) return {};
  return poly_roots(e.sector_poly);
}

BetheReport verify_bethe_identity(const SexticModel& m, Cplx E,
                                  const std::vector<Cplx>& roots,
                                  const Tolerances& tol) {
  (void)tol;
  if (static_cast<int>(roots.size()) != m.M)
    throw DomainError("verify_bethe_identity: need exactly M roots");
  BetheReport rep;
  for (int j = 0; j < 10; ++j) {
    Real x = 0.37 + 0.29 * j;
    Cplx t(x * x, 0.0);
    for (int guard = 0; guard < 100; ++guard) {
      bool clash = false;
      for (const auto& al : roots)
        if (std::abs(t - al) < 0.05 * (1.0 + std::abs(al))) clash = true;
      if (!clash) break;
      t += Cplx(0.0137, 0.0);
    }
    rep.samples_t.push_back(t);

    Cplx single(0.0), cross(0.0);
    for (std::size_t k = 0; k < roots.size(); ++k) {
      single += (4.0 * m.a * t * t - 8.0 * m.s) / (t - roots[k]);
      for (std::size_t l = 0; l < roots.size(); ++l) {
        if (l == k) continue;
        cross += 4.0 * t / ((t - roots[k]) * (t - roots[l]));
      }
    }
    Cplx tail = -4.0 * m.a * Real(m.M) * t - E;
    Cplx ordered = single - cross + tail;
    Cplx unordered = single - 0.5 * cross + tail;
    rep.max_residual_ordered =
        std::max(rep.max_residual_ordered, std::abs(ordered));
    rep.max_residual_unordered =
        std::max(rep.max_residual_unordered, std::abs(unordered));
  }
  return rep;
}

}  // namespace qesdx
