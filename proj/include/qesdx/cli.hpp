#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qesdx/darboux.hpp"
#include "qesdx/numerov.hpp"

namespace qesdx {

struct GridSpec {
  Real x_min = 0.05;
  Real x_max = 4.0;
  int points = 400;
};

// One run request: a model, what to do with it, and where results go.
// chain selectors: "state:<i>" (sector index by increasing real energy),
// "conj-pair" (complex-pair construction), "ground-chain" (two-step chain
// seeded by the two lowest states).
struct Job {
  Real a = 0.5;
  Real s = 0.5;
  int M = 0;
  std::string action;  // spectrum | transform | classify | verify | sample
  std::vector<std::string> chain;
  GridSpec grid;
  std::string out_path;
  std::string csv_path;
};

// Strict parse: unknown fields, missing model, malformed selectors all throw
// DomainError with context.
Job parse_job(const std::string& text);

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 1 input error, 2 verification failure, 3 singular
  nlohmann::json report;
  std::string text;  // human-readable rendering
  std::string csv;   // populated when the run sampled a grid
};

RunOutcome run_job(const Job& job, const Tolerances& tol = default_tols());

// CSV with columns x, one per potential, then Re/Im pairs per wave.
// Cells are left empty near poles and where |value| overflows 1e12.
// Potentials that are not real on the half line are skipped.
std::string sample_grid(const GridSpec& grid,
                        const std::vector<std::pair<std::string, RationalPotential>>& pots,
                        const std::vector<std::pair<std::string, QuasiWave>>& waves,
                        const Tolerances& tol = default_tols());

std::string render_report(const nlohmann::json& report);

// Display form with the polynomial part split out and the remainder written
// as partial fractions over the real factors of the denominator.
std::string pretty_potential(const RationalPotential& V,
                             const Tolerances& tol = default_tols());

}  // namespace qesdx
