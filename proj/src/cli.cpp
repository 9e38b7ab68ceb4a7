#include "qesdx/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include <Eigen/Dense>

namespace qesdx {

using nlohmann::json;

namespace {

// ---------- number / poly formatting ----------

std::string fmt_shortest(Real v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_disp(Real v) {
  std::ostringstream os;
  os.precision(8);
  os << v;
  return os.str();
}

bool is_tiny(Cplx c, Real scale) { return std::abs(c) <= 1e-11 * (1.0 + scale); }

bool is_realish(Cplx c) { return std::abs(c.imag()) <= 1e-9 * (1.0 + std::abs(c)); }

std::string fmt_cplx_disp(Cplx c) {
  if (is_realish(c)) return fmt_disp(c.real());
  if (std::abs(c.real()) <= 1e-9 * (1.0 + std::abs(c)))
    return fmt_disp(c.imag()) + "i";
  std::ostringstream os;
  os << "(" << fmt_disp(c.real()) << (c.imag() < 0 ? " - " : " + ")
     << fmt_disp(std::abs(c.imag())) << "i)";
  return os.str();
}

// Even-power display: coefficient of t^j prints as x^(2j).
std::string poly_in_x2(const PolyC& p) {
  if (p.is_zero()) return "0";
  Real scale = p.max_mag();
  std::ostringstream os;
  bool first = true;
  for (int j = p.degree(); j >= 0; --j) {
    Cplx c = p.at(j);
    if (is_tiny(c, scale)) continue;
    std::string mag;
    bool negated = false;
    if (is_realish(c)) {
      negated = c.real() < 0;
      Real v = std::abs(c.real());
      bool unit = std::abs(v - 1.0) <= 1e-12 && j > 0;
      mag = unit ? "" : fmt_disp(v);
    } else if (std::abs(c.real()) <= 1e-9 * (1.0 + std::abs(c))) {
      negated = c.imag() < 0;
      mag = fmt_disp(std::abs(c.imag())) + "i";
    } else {
      mag = fmt_cplx_disp(c);
    }
    std::string var = j == 0 ? "" : "x^" + std::to_string(2 * j);
    std::string term = mag.empty() ? var
                       : var.empty() ? mag
                                     : mag + "*" + var;
    if (first) {
      os << (negated ? "-" : "") << term;
      first = false;
    } else {
      os << (negated ? " - " : " + ") << term;
    }
  }
  std::string s = os.str();
  return s.empty() ? "0" : s;
}

void poly_divmod(const PolyC& num, const PolyC& den, PolyC* q, PolyC* r) {
  PolyC rem = num;
  PolyC quot;
  int dd = den.degree();
  if (dd < 0) throw DomainError("division by the zero polynomial");
  if (rem.degree() >= dd) quot.c.assign(rem.degree() - dd + 1, Cplx(0.0));
  while (rem.degree() >= dd && !rem.is_zero()) {
    int k = rem.degree() - dd;
    Cplx f = rem.lead() / den.lead();
    quot.c[k] = f;
    rem = poly_sub(rem, poly_shift_up(poly_scale(den, f), k));
    while (rem.degree() >= 0 && rem.degree() >= dd + k) rem.c.pop_back();
  }
  rem.canonicalize();
  quot.canonicalize();
  *q = quot;
  *r = rem;
}

struct DispFactor {
  PolyC f;   // monic, degree 1 or 2, real coefficients
  int mult;
};

// Builds the real factor list of a real-coefficient polynomial from its
// clustered roots; returns false when the factors do not rebuild the input.
bool real_factors(const PolyC& den, int* zero_mult, std::vector<DispFactor>* out) {
  *zero_mult = 0;
  out->clear();
  if (den.degree() < 1) return true;
  auto clusters = polished_clusters(den);
  std::vector<char> used(clusters.size(), 0);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (used[i]) continue;
    Cplx z = clusters[i].location;
    int m = clusters[i].multiplicity;
    Real sc = 1.0 + std::abs(z);
    if (std::abs(z) <= 1e-8) {
      *zero_mult += m;
      used[i] = 1;
      continue;
    }
    if (std::abs(z.imag()) <= 1e-8 * sc) {
      PolyC f;
      f.c = {Cplx(-z.real()), Cplx(1.0)};
      out->push_back({f, m});
      used[i] = 1;
      continue;
    }
    // find the conjugate partner
    bool found = false;
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      if (used[j] || clusters[j].multiplicity != m) continue;
      if (std::abs(clusters[j].location - std::conj(z)) <= 1e-6 * sc) {
        PolyC f;
        f.c = {Cplx(std::norm(z)), Cplx(-2.0 * z.real()), Cplx(1.0)};
        out->push_back({f, m});
        used[i] = used[j] = 1;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  int total = *zero_mult;
  for (const auto& f : *out) total += f.f.degree() * f.mult;
  return total == den.degree();
}

std::string fraction_term(const PolyC& numer, const std::string& den_disp,
                          int power, bool* lead_negative) {
  // numer has real-ish coefficients in the display path
  std::string num_disp;
  bool neg = false;
  if (numer.degree() == 0 && is_realish(numer.at(0))) {
    Real v = numer.at(0).real();
    neg = v < 0;
    num_disp = fmt_disp(std::abs(v));
  } else {
    PolyC n = numer;
    Cplx l = n.lead();
    if (is_realish(l) && l.real() < 0) {
      neg = true;
      n = poly_scale(n, Cplx(-1.0));
    }
    num_disp = "(" + poly_in_x2(n) + ")";
  }
  *lead_negative = neg;
  std::string den = power == 1 ? den_disp : den_disp + "^" + std::to_string(power);
  return num_disp + "/" + den;
}

}  // namespace

std::string pretty_potential(const RationalPotential& V, const Tolerances& tol) {
  const RationalT& r = V.rat;
  if (r.is_zero()) return "0";

  PolyC q, rem;
  poly_divmod(r.num, r.den, &q, &rem);

  struct Piece {
    bool neg;
    std::string body;
  };
  std::vector<Piece> pieces;
  Real qscale = q.max_mag();
  for (int j = q.degree(); j >= 0; --j) {
    Cplx c = q.at(j);
    if (is_tiny(c, qscale)) continue;
    bool neg = is_realish(c) && c.real() < 0;
    std::string mag = is_realish(c) ? fmt_disp(std::abs(c.real())) : fmt_cplx_disp(c);
    bool unit = is_realish(c) && std::abs(std::abs(c.real()) - 1.0) <= 1e-12 && j > 0;
    std::string body = j == 0 ? mag
                      : unit  ? "x^" + std::to_string(2 * j)
                              : mag + "*x^" + std::to_string(2 * j);
    pieces.push_back({neg, body});
  }

  bool fractions_done = rem.is_zero();
  if (!fractions_done && realness_check(r, tol)) {
    int zero_mult = 0;
    std::vector<DispFactor> factors;
    if (real_factors(r.den, &zero_mult, &factors)) {
      // Partial fractions: solve for the numerators over the factor basis.
      struct Basis {
        PolyC shape;  // t^j * den / F^p
        int fi, p, j; // fi = -1 means the pure t^-p series
      };
      std::vector<Basis> basis;
      PolyC tpoly;
      tpoly.c = {Cplx(0.0), Cplx(1.0)};
      auto den_over = [&](const PolyC& f, int p) {
        PolyC cur = r.den;
        for (int i = 0; i < p; ++i) {
          PolyC qq, rr;
          poly_divmod(cur, f, &qq, &rr);
          cur = qq;
        }
        return cur;
      };
      for (int p = 1; p <= zero_mult; ++p)
        basis.push_back({den_over(tpoly, p), -1, p, 0});
      for (std::size_t fi = 0; fi < factors.size(); ++fi)
        for (int p = 1; p <= factors[fi].mult; ++p)
          for (int j = 0; j < factors[fi].f.degree(); ++j)
            basis.push_back({poly_shift_up(den_over(factors[fi].f, p), j),
                             static_cast<int>(fi), p, j});

      const int rows = r.den.degree();
      const int cols = static_cast<int>(basis.size());
      if (cols == rows) {
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(rows, cols);
        Eigen::VectorXcd b = Eigen::VectorXcd::Zero(rows);
        for (int i = 0; i < rows; ++i) b(i) = rem.at(i);
        for (int c = 0; c < cols; ++c)
          for (int i = 0; i < rows; ++i) A(i, c) = basis[c].shape.at(i);
        Eigen::VectorXcd u = A.colPivHouseholderQr().solve(b);
        Real resid = (A * u - b).norm();
        if (resid <= 1e-6 * (1.0 + b.norm())) {
          // pure 1/x^(2p) pieces
          for (int c = 0; c < cols; ++c) {
            if (basis[c].fi != -1) continue;
            Cplx v = u(c);
            if (is_tiny(v, rem.max_mag())) continue;
            bool neg = is_realish(v) && v.real() < 0;
            std::string mag = is_realish(v) ? fmt_disp(std::abs(v.real()))
                                            : fmt_cplx_disp(v);
            pieces.push_back({neg, mag + "/x^" + std::to_string(2 * basis[c].p)});
          }
          // proper fractions per factor and power
          for (std::size_t fi = 0; fi < factors.size(); ++fi) {
            std::string fd = "(" + poly_in_x2(factors[fi].f) + ")";
            for (int p = 1; p <= factors[fi].mult; ++p) {
              PolyC numer;
              for (int c = 0; c < cols; ++c)
                if (basis[c].fi == static_cast<int>(fi) && basis[c].p == p) {
                  if (static_cast<int>(numer.c.size()) <= basis[c].j)
                    numer.c.resize(basis[c].j + 1, Cplx(0.0));
                  numer.c[basis[c].j] = u(c);
                }
              numer.canonicalize();
              if (numer.is_zero()) continue;
              bool neg = false;
              std::string body = fraction_term(numer, fd, p, &neg);
              pieces.push_back({neg, body});
            }
          }
          fractions_done = true;
        }
      }
    }
  }
  if (!fractions_done) {
    bool neg = false;
    std::string body =
        "(" + poly_in_x2(rem) + ")/(" + poly_in_x2(r.den) + ")";
    pieces.push_back({neg, body});
  }

  if (pieces.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (i == 0)
      os << (pieces[i].neg ? "-" : "") << pieces[i].body;
    else
      os << (pieces[i].neg ? " - " : " + ") << pieces[i].body;
  }
  return os.str();
}

// ---------- job parsing ----------

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw DomainError(std::string("parse error: unknown field \"") + it.key() +
                        "\" in " + where);
  }
}

Real get_num(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key))
    throw DomainError(std::string("parse error: missing \"") + key + "\" in " + where);
  if (!obj[key].is_number())
    throw DomainError(std::string("parse error: \"") + key + "\" in " + where +
                      " must be a number");
  return obj[key].get<Real>();
}

}  // namespace

Job parse_job(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("parse error: job must be a single object");
  require_keys(j, {"model", "action", "chain", "grid", "out", "csv"}, "job");

  Job job;
  if (!j.contains("model"))
    throw DomainError("parse error: missing model");
  const json& model = j["model"];
  if (!model.is_object()) throw DomainError("parse error: model must be an object");
  require_keys(model, {"a", "s", "M"}, "model");
  job.a = get_num(model, "a", "model");
  job.s = get_num(model, "s", "model");
  Real mraw = get_num(model, "M", "model");
  if (std::abs(mraw - std::round(mraw)) > 1e-12 || mraw < 0)
    throw DomainError("parse error: M must be a nonnegative integer");
  job.M = static_cast<int>(std::round(mraw));

  if (!j.contains("action") || !j["action"].is_string())
    throw DomainError("parse error: missing action");
  job.action = j["action"].get<std::string>();
  static const std::set<std::string> actions = {"spectrum", "transform",
                                                "classify", "verify", "sample"};
  if (!actions.count(job.action))
    throw DomainError("parse error: unknown action \"" + job.action + "\"");

  if (j.contains("chain")) {
    if (!j["chain"].is_array())
      throw DomainError("parse error: chain must be an array of selectors");
    for (const auto& sel : j["chain"]) {
      if (!sel.is_string())
        throw DomainError("parse error: chain selectors must be strings");
      std::string s = sel.get<std::string>();
      bool ok = s == "conj-pair" || s == "ground-chain";
      if (!ok && s.rfind("state:", 0) == 0) {
        std::string idx = s.substr(6);
        ok = !idx.empty() &&
             std::all_of(idx.begin(), idx.end(), [](char c) { return c >= '0' && c <= '9'; });
      }
      if (!ok) throw DomainError("parse error: malformed selector \"" + s + "\"");
      job.chain.push_back(s);
    }
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) throw DomainError("parse error: grid must be an object");
    require_keys(g, {"x_min", "x_max", "points"}, "grid");
    if (g.contains("x_min")) job.grid.x_min = get_num(g, "x_min", "grid");
    if (g.contains("x_max")) job.grid.x_max = get_num(g, "x_max", "grid");
    if (g.contains("points")) {
      Real p = get_num(g, "points", "grid");
      if (std::abs(p - std::round(p)) > 1e-12 || p < 2)
        throw DomainError("parse error: grid points must be an integer >= 2");
      job.grid.points = static_cast<int>(std::round(p));
    }
    if (!(job.grid.x_min > 0.0) || !(job.grid.x_max > job.grid.x_min))
      throw DomainError("parse error: grid needs 0 < x_min < x_max");
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw DomainError("parse error: out must be a string");
    job.out_path = j["out"].get<std::string>();
  }
  if (j.contains("csv")) {
    if (!j["csv"].is_string()) throw DomainError("parse error: csv must be a string");
    job.csv_path = j["csv"].get<std::string>();
  }
  return job;
}

// ---------- grid sampling ----------

std::string sample_grid(const GridSpec& grid,
                        const std::vector<std::pair<std::string, RationalPotential>>& pots,
                        const std::vector<std::pair<std::string, QuasiWave>>& waves,
                        const Tolerances& tol) {
  const int n = std::max(grid.points, 2);
  const Real dx = (grid.x_max - grid.x_min) / (n - 1);

  struct PotCol {
    const RationalPotential* p;
    std::vector<Real> pole_x;
  };
  struct WaveCol {
    const QuasiWave* w;
    std::vector<Real> pole_x;
  };
  std::ostringstream head;
  head << "x";
  std::vector<PotCol> pcols;
  for (const auto& [name, p] : pots) {
    if (!realness_check(p.rat, tol)) continue;  // complex-valued: no real column
    PotCol c{&p, {}};
    for (Real tp : pole_scan(p.rat, tol)) c.pole_x.push_back(std::sqrt(tp));
    head << "," << name;
    pcols.push_back(std::move(c));
  }
  std::vector<WaveCol> wcols;
  for (const auto& [name, w] : waves) {
    WaveCol c{&w, {}};
    for (Real tp : pole_scan(w.den, tol)) c.pole_x.push_back(std::sqrt(tp));
    head << ",Re " << name << ",Im " << name;
    wcols.push_back(std::move(c));
  }

  auto holed = [&](const std::vector<Real>& px, Real x) {
    for (Real p : px)
      if (std::abs(x - p) <= 0.5 * dx + 1e-12) return true;
    return false;
  };

  std::ostringstream os;
  os << head.str() << "\n";
  for (int i = 0; i < n; ++i) {
    Real x = grid.x_min + i * dx;
    os << fmt_shortest(x);
    for (const auto& c : pcols) {
      os << ",";
      if (holed(c.pole_x, x)) continue;
      Real v = c.p->eval(x).real();
      if (!std::isfinite(v) || std::abs(v) > 1e12) continue;
      os << fmt_shortest(v);
    }
    for (const auto& c : wcols) {
      if (holed(c.pole_x, x)) {
        os << ",,";
        continue;
      }
      Cplx v;
      try {
        v = qw_eval(*c.w, x);
      } catch (const PoleError&) {
        os << ",,";
        continue;
      }
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) ||
          std::abs(v.real()) > 1e12 || std::abs(v.imag()) > 1e12) {
        os << ",,";
        continue;
      }
      os << "," << fmt_shortest(v.real()) << "," << fmt_shortest(v.imag());
    }
    os << "\n";
  }
  return os.str();
}

// ---------- report assembly ----------

namespace {

json cplx_json(Cplx c) { return json::array({c.real(), c.imag()}); }

json poly_json(const PolyC& p) {
  json out = json::array();
  for (const auto& c : p.c) out.push_back(cplx_json(c));
  return out;
}

json potential_json(const std::string& name, const RationalPotential& V,
                    const Tolerances& tol) {
  json out;
  out["name"] = name;
  out["num"] = poly_json(V.rat.num);
  out["den"] = poly_json(V.rat.den);
  out["real"] = realness_check(V.rat, tol);
  out["poles"] = pole_scan(V.rat, tol);
  out["pretty"] = pretty_potential(V, tol);
  return out;
}

json state_json(const std::string& name, const std::string& pot_name,
                const SpectralEntry& e) {
  json out;
  out["name"] = name;
  out["potential"] = pot_name;
  out["energy"] = cplx_json(e.energy);
  out["scale"] = cplx_json(e.wave.scale);
  out["a"] = e.wave.a;
  out["k"] = e.wave.k;
  out["sigma"] = e.wave.sigma;
  out["num"] = poly_json(e.wave.num);
  out["den"] = poly_json(e.wave.den);
  out["nodes"] = e.nodes;
  out["physical"] = e.physical;
  out["residual"] = e.residual_norm;
  return out;
}

json job_echo(const Job& job) {
  json out;
  out["model"] = {{"a", job.a}, {"s", job.s}, {"M", job.M}};
  out["action"] = job.action;
  if (!job.chain.empty()) out["chain"] = job.chain;
  out["grid"] = {{"x_min", job.grid.x_min},
                 {"x_max", job.grid.x_max},
                 {"points", job.grid.points}};
  if (!job.out_path.empty()) out["out"] = job.out_path;
  if (!job.csv_path.empty()) out["csv"] = job.csv_path;
  return out;
}

SpectralEntry make_derived(const RationalPotential& V, Cplx E,
                           const QuasiWave& wave, const Tolerances& tol) {
  SpectralEntry e;
  e.energy = E;
  e.wave = wave;
  e.sector_poly = wave.num;
  if (wave.num.degree() > 0) {
    for (const auto& c : polished_clusters(wave.num))
      if (c.location.real() > tol.pole_floor &&
          std::abs(c.location.imag()) < tol.pole_floor && (c.multiplicity % 2))
        ++e.nodes;
  }
  auto rr = residual(V.rat, E, wave, tol);
  e.residual_norm = rr.norm;
  if (!rr.pass) throw NumericalError("derived state fails the residual check");
  bool real_e = std::abs(E.imag()) <= 1e-9 * (1.0 + std::abs(E));
  e.physical = real_e && normalizable(wave, tol).normalizable;
  return e;
}

struct Pipeline {
  SexticModel m;
  Spectrum sp;
  std::string classification;
  std::vector<std::pair<std::string, RationalPotential>> pots;  // includes V0
  // name, potential name, entry
  std::vector<std::tuple<std::string, std::string, SpectralEntry>> states;
  bool invalid = false;
  bool v1_complex = false;
  json extra;  // classification details
};

int resolve_state(const std::string& sel, const Spectrum& sp) {
  int idx = std::stoi(sel.substr(6));
  if (idx < 0 || idx >= static_cast<int>(sp.entries.size()))
    throw DomainError("chain selector out of range: " + sel);
  return idx;
}

void run_two_state_chain(Pipeline* pl, const QuasiWave& wa, const QuasiWave& wb,
                         const Tolerances& tol) {
  ChainReport rep = classify_chain(pl->m.V0, wa, wb, pl->sp.entries, tol);
  pl->classification = chain_kind_name(rep.kind);
  pl->invalid = rep.kind == ChainKind::Invalid;
  pl->v1_complex = !rep.V1_real;
  pl->pots.push_back({"V1", rep.V1});
  pl->pots.push_back({"V2", rep.V2});
  for (std::size_t i = 0; i < rep.mapped.size(); ++i)
    pl->states.push_back({"chi_" + std::to_string(i), "V2", rep.mapped[i]});
  pl->extra["alpha_a"] = cplx_json(rep.alpha_a);
  pl->extra["alpha_b"] = cplx_json(rep.alpha_b);
  pl->extra["V1_real"] = rep.V1_real;
  pl->extra["V1_poles"] = rep.V1_poles;
  pl->extra["V2_poles"] = rep.V2_poles;
}

Pipeline build_pipeline(const Job& job, const Tolerances& tol) {
  if (job.action == "transform" && job.chain.empty())
    throw DomainError("transform needs a chain selector");
  if (job.action == "classify") {
    bool pair_sel = job.chain.size() == 2 && job.chain[0].rfind("state:", 0) == 0 &&
                    job.chain[1].rfind("state:", 0) == 0;
    bool conj_sel = job.chain.size() == 1 && job.chain[0] == "conj-pair";
    if (!pair_sel && !conj_sel)
      throw DomainError(
          "classify needs two state selectors or the conjugate-pair selector");
  }
  Pipeline pl;
  pl.m = build_model(job.a, job.s, job.M);
  pl.sp = qes_spectrum(pl.m, tol);
  pl.pots.push_back({"V0", pl.m.V0});
  for (std::size_t i = 0; i < pl.sp.entries.size(); ++i)
    pl.states.push_back({"psi_" + std::to_string(i), "V0", pl.sp.entries[i]});

  const auto& chain = job.chain;
  if (chain.empty()) return pl;

  if (chain.size() == 1 && chain[0] == "ground-chain") {
    ReducibleChain rc = reducible_chain(pl.m, tol);
    pl.pots.push_back({"V1", rc.op0.V_out});
    pl.pots.push_back({"V2", rc.V2});
    for (std::size_t i = 0; i < rc.intermediate.size(); ++i)
      pl.states.push_back({"phi_" + std::to_string(i + 1), "V1", rc.intermediate[i]});
    for (std::size_t i = 0; i < rc.final_states.size(); ++i)
      pl.states.push_back({"chi_" + std::to_string(i + 2), "V2", rc.final_states[i]});
    ChainReport rep = classify_chain(pl.m.V0, pl.sp.entries[0].wave,
                                     pl.sp.entries[1].wave, {}, tol);
    pl.classification = chain_kind_name(rep.kind);
    pl.invalid = rep.kind == ChainKind::Invalid;
    pl.v1_complex = !rep.V1_real;
    pl.extra["alpha_a"] = cplx_json(rep.alpha_a);
    pl.extra["alpha_b"] = cplx_json(rep.alpha_b);
    pl.extra["V1_real"] = rep.V1_real;
    pl.extra["V1_poles"] = rep.V1_poles;
    pl.extra["V2_poles"] = rep.V2_poles;
    return pl;
  }

  if (chain.size() == 1 && chain[0] == "conj-pair") {
    auto pairs = complex_solutions(pl.m, tol);
    if (pairs.empty())
      throw DomainError("conj-pair: the covariant sector has no complex pair");
    const auto& pr = pairs.front();
    pl.states.push_back({"psi_minus", "V0", pr.minus});
    pl.states.push_back({"psi_plus", "V0", pr.plus});
    run_two_state_chain(&pl, pr.minus.wave, pr.plus.wave, tol);
    return pl;
  }

  if (chain.size() == 1 && chain[0].rfind("state:", 0) == 0) {
    int i = resolve_state(chain[0], pl.sp);
    const auto& seed = pl.sp.entries[i];
    FirstOrderOp op = first_order(pl.m.V0, seed.wave, seed.energy, tol);
    pl.pots.push_back({"V1", op.V_out});
    pl.classification = "FirstOrder";
    for (std::size_t jdx = 0; jdx < pl.sp.entries.size(); ++jdx) {
      if (static_cast<int>(jdx) == i) continue;
      QuasiWave img = apply_first_order(op, pl.sp.entries[jdx].wave, tol);
      if (img.is_zero()) continue;
      pl.states.push_back({"phi_" + std::to_string(jdx), "V1",
                           make_derived(op.V_out, pl.sp.entries[jdx].energy, img, tol)});
    }
    pl.extra["alpha_a"] = cplx_json(op.alpha);
    pl.extra["V1_real"] = realness_check(op.V_out.rat, tol);
    pl.extra["V1_poles"] = pole_scan(op.V_out.rat, tol);
    return pl;
  }

  if (chain.size() == 2 && chain[0].rfind("state:", 0) == 0 &&
      chain[1].rfind("state:", 0) == 0) {
    int i = resolve_state(chain[0], pl.sp);
    int jdx = resolve_state(chain[1], pl.sp);
    if (i == jdx) throw DomainError("chain selectors must name two distinct states");
    run_two_state_chain(&pl, pl.sp.entries[i].wave, pl.sp.entries[jdx].wave, tol);
    return pl;
  }

  throw DomainError("unsupported chain selector combination");
}

}  // namespace

std::string render_report(const json& rep) {
  std::ostringstream os;
  if (rep.contains("job") && rep["job"].contains("model")) {
    const auto& m = rep["job"]["model"];
    os << "model: a = " << m["a"].get<Real>() << ", s = " << m["s"].get<Real>()
       << ", M = " << m["M"].get<int>() << "\n";
    os << "action: " << rep["job"]["action"].get<std::string>() << "\n";
  }
  if (rep.contains("error")) {
    os << "error: " << rep["error"].get<std::string>() << "\n";
    return os.str();
  }
  if (rep.contains("classification"))
    os << "classification: " << rep["classification"].get<std::string>() << "\n";
  if (rep.contains("potentials")) {
    os << "potentials:\n";
    for (const auto& p : rep["potentials"]) {
      os << "  " << p["name"].get<std::string>() << ": ";
      if (p["real"].get<bool>())
        os << p["pretty"].get<std::string>() << "\n";
      else
        os << p["pretty"].get<std::string>() << "   [complex-valued]\n";
      if (!p["poles"].empty()) {
        os << "    poles at t =";
        for (const auto& t : p["poles"]) os << " " << t.get<Real>();
        os << "\n";
      }
    }
    for (const auto& p : rep["potentials"])
      if (p["name"] == "V1" && !p["real"].get<bool>())
        os << "intermediate potential: complex-valued\n";
  }
  if (rep.contains("states")) {
    os << "states:\n";
    for (const auto& st : rep["states"]) {
      Cplx e(st["energy"][0].get<Real>(), st["energy"][1].get<Real>());
      os << "  " << st["name"].get<std::string>() << " ["
         << st["potential"].get<std::string>() << "]  E = " << fmt_cplx_disp(e)
         << "  nodes " << st["nodes"].get<int>()
         << (st["physical"].get<bool>() ? "  physical" : "  non-physical")
         << "  residual " << st["residual"].get<Real>() << "\n";
    }
  }
  if (rep.contains("diagnostics")) {
    const auto& d = rep["diagnostics"];
    os << "diagnostics:\n";
    if (d.contains("deficiency") && d["deficiency"].get<int>() > 0)
      os << "  sector deficiency: " << d["deficiency"].get<int>() << "\n";
    if (d.contains("numerov")) {
      os << "  numerov levels:";
      for (const auto& e : d["numerov"]) os << " " << e.get<Real>();
      os << "\n";
    }
    if (d.contains("bethe")) {
      for (const auto& b : d["bethe"])
        os << "  closure-root residual [" << b["state"].get<std::string>()
           << "]: ordered " << b["ordered"].get<Real>() << ", unordered "
           << b["unordered"].get<Real>() << "\n";
    }
    if (d.contains("notes"))
      for (const auto& nte : d["notes"]) os << "  note: " << nte.get<std::string>() << "\n";
  }
  if (rep.contains("pass")) {
    if (rep["pass"].get<bool>()) {
      os << "all residuals pass\n";
    } else {
      os << "verification FAILED";
      if (rep.contains("failures")) {
        os << ":";
        for (const auto& f : rep["failures"]) os << " " << f.get<std::string>();
      }
      os << "\n";
    }
  }
  return os.str();
}

RunOutcome run_job(const Job& job, const Tolerances& tol) {
  RunOutcome out;
  json rep;
  rep["job"] = job_echo(job);
  try {
    Pipeline pl = build_pipeline(job, tol);

    json pots = json::array();
    for (const auto& [name, p] : pl.pots) pots.push_back(potential_json(name, p, tol));
    rep["potentials"] = pots;

    json states = json::array();
    Real max_res = 0.0;
    json failures = json::array();
    for (const auto& [name, pot, e] : pl.states) {
      states.push_back(state_json(name, pot, e));
      max_res = std::max(max_res, e.residual_norm);
      if (!(e.residual_norm < tol.residual)) failures.push_back(name);
    }
    rep["states"] = states;
    if (!pl.classification.empty()) rep["classification"] = pl.classification;
    if (!pl.extra.is_null()) rep["chain"] = pl.extra;

    json diag;
    diag["max_residual"] = max_res;
    diag["deficiency"] = pl.sp.deficiency;

    if (job.action == "spectrum" || job.action == "verify") {
      try {
        auto pairs = complex_solutions(pl.m, tol);
        if (!pairs.empty()) {
          json cp = json::array();
          for (const auto& pr : pairs) {
            json one;
            one["minus"] = state_json("psi_minus", "V0", pr.minus);
            one["plus"] = state_json("psi_plus", "V0", pr.plus);
            cp.push_back(one);
          }
          diag["complex_pairs"] = cp;
        }
      } catch (const DomainError& e) {
        diag["notes"] = json::array({std::string("covariant partner unavailable: ") + e.what()});
      }
    }

    bool pass = failures.empty();

    if (job.action == "verify") {
      json bethe = json::array();
      for (std::size_t i = 0; i < pl.sp.entries.size(); ++i) {
        const auto& e = pl.sp.entries[i];
        auto roots = bethe_roots(e);
        auto br = verify_bethe_identity(pl.m, e.energy, roots, tol);
        json b;
        b["state"] = "psi_" + std::to_string(i);
        b["ordered"] = br.max_residual_ordered;
        b["unordered"] = br.max_residual_unordered;
        bethe.push_back(b);
        if (!(br.max_residual_ordered < 1e-8 * (1.0 + std::abs(e.energy)))) {
          pass = false;
          failures.push_back("bethe:psi_" + std::to_string(i));
        }
      }
      rep["diagnostics"] = diag;  // provisional, rewritten below
      rep["diagnostics"]["bethe"] = bethe;

      std::vector<Real> phys;
      for (const auto& e : pl.sp.entries)
        if (e.physical) phys.push_back(e.energy.real());
      if (!phys.empty()) {
        NumerovConfig cfg;
        cfg.e_lo = *std::min_element(phys.begin(), phys.end()) - 2.0;
        cfg.e_hi = *std::max_element(phys.begin(), phys.end()) + 2.0;
        auto nr = numerov_spectrum(pl.m.V0, cfg, tol);
        json lv = json::array();
        for (const auto& l : nr.levels) lv.push_back(l.energy);
        rep["diagnostics"]["numerov"] = lv;
        for (std::size_t i = 0; i < phys.size(); ++i) {
          bool found = false;
          for (const auto& l : nr.levels)
            if (std::abs(l.energy - phys[i]) < 1e-4) found = true;
          if (!found) {
            pass = false;
            failures.push_back("numerov:E=" + fmt_disp(phys[i]));
          }
        }
      }
      diag = rep["diagnostics"];
    }

    if (job.action == "sample" || !job.csv_path.empty()) {
      std::vector<std::pair<std::string, QuasiWave>> waves;
      for (const auto& [name, pot, e] : pl.states) waves.push_back({name, e.wave});
      out.csv = sample_grid(job.grid, pl.pots, waves, tol);
    }

    rep["diagnostics"] = diag;
    rep["pass"] = pass;
    if (!failures.empty()) rep["failures"] = failures;
    out.exit_code = pl.invalid ? 3 : (pass ? 0 : 2);
  } catch (const PoleError& e) {
    rep["error"] = e.what();
    out.exit_code = 3;
  } catch (const DomainError& e) {
    rep["error"] = e.what();
    out.exit_code =
        std::string(e.what()).find("singular") != std::string::npos ? 3 : 1;
  } catch (const NumericalError& e) {
    rep["error"] = e.what();
    out.exit_code = 2;
  }
  out.report = rep;
  out.text = render_report(rep);
  return out;
}

}  // namespace qesdx
