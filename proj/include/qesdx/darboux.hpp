#pragma once

#include <optional>
#include <vector>

#include "qesdx/sextic.hpp"

namespace qesdx {

// First-order intertwiner L = d/dx + W built from a factorization function:
//   V_in = W^2 - W' + alpha,   V_out = V_in + 2 W'.
struct FirstOrderOp {
  Superpotential W;
  Cplx alpha;
  QuasiWave seed;  // the function annihilated by L
  RationalPotential V_in;
  RationalPotential V_out;
};

// Second-order map built on a pair of factorization functions:
//   L f = W(wa, wb, f) / W(wa, wb),   V_out = V_in - 2 (ln W(wa, wb))''.
struct SecondOrderOp {
  QuasiWave wa, wb;
  Cplx alpha_a, alpha_b;
  QuasiWave wron;  // W(wa, wb), nonzero
  RationalPotential V_in;
  RationalPotential V_out;
};

enum class ChainKind { Reducible, IrreducibleType1, IrreducibleType2, Invalid };

const char* chain_kind_name(ChainKind k);

struct ChainReport {
  ChainKind kind = ChainKind::Invalid;
  Cplx alpha_a, alpha_b;
  // Intermediate potential of the reported factorization order. Present for
  // every kind; real and regular only in the reducible case.
  RationalPotential V1;
  bool V1_real = false;
  std::vector<Real> V1_poles;  // t-locations, includes first-factor zeros
  RationalPotential V2;
  std::vector<Real> V2_poles;
  std::vector<SpectralEntry> mapped;  // images of supplied source states
};

struct ReducibleChain {
  FirstOrderOp op0;
  std::vector<SpectralEntry> intermediate;  // M states of V1
  FirstOrderOp op1;
  RationalPotential V2;
  std::vector<SpectralEntry> final_states;  // M-1 states of V2
  SecondOrderOp direct;  // one-step construction of the same chain
};

// Checks (-f'' + V f) = alpha f exactly, then forms W = -(ln f)'.
FirstOrderOp first_order(const RationalPotential& V, const QuasiWave& f,
                         Cplx alpha, const Tolerances& tol = default_tols());

QuasiWave apply_first_order(const FirstOrderOp& op, const QuasiWave& f,
                            const Tolerances& tol = default_tols());
// Adjoint map -d/dx + W, undoing L up to the factorization shift.
QuasiWave apply_adjoint(const FirstOrderOp& op, const QuasiWave& f,
                        const Tolerances& tol = default_tols());

// Infers the two eigenvalues from the pair itself; rejects pairs that are
// not factorization functions of V or whose Wronskian vanishes.
SecondOrderOp second_order(const RationalPotential& V, const QuasiWave& wa,
                           const QuasiWave& wb,
                           const Tolerances& tol = default_tols());

QuasiWave apply_second_order(const SecondOrderOp& op, const QuasiWave& f,
                             const Tolerances& tol = default_tols());

// Ground-state chain of a sector with M >= 1: strips the two lowest states
// one at a time, carrying the rest of the sector along. Verifies the
// composed two-step potential against the direct Wronskian construction.
ReducibleChain reducible_chain(const SexticModel& m,
                               const Tolerances& tol = default_tols());

// Classifies the chain on (wa, wb) and maps the optional source states.
ChainReport classify_chain(const RationalPotential& V0, const QuasiWave& wa,
                           const QuasiWave& wb,
                           const std::vector<SpectralEntry>& sources = {},
                           const Tolerances& tol = default_tols());

}  // namespace qesdx
