#pragma once

#include <string>
#include <vector>

#include "svset/rootfind.hpp"
#include "svset/sections.hpp"

namespace svset {

/// Result of one solve; counter semantics mirror the benchmark table columns
/// (pencil eigensolves, transfer-norm evaluations, level and root searches).
struct SolveReport {
  Mode mode = Mode::Abscissa;
  Method method = Method::Improved;
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  double eta = 0.0;
  bool eta_infinite = false;
  bool converged = false;
  std::vector<double> iterates;  // strictly increasing; eta equals the last

  long eig_solves = 0;
  long svd_evals = 0;
  long level_searches = 0;  // vertical or circular pencil searches
  long line_searches = 0;   // direct-extended horizontal/radial pencil searches
  long root_searches_solved = 0;
  long root_searches_requested = 0;
  int escape_events = 0;  // random-direction restarts (radius mode)
  int iterations = 0;

  std::vector<std::string> diagnostics;
  bool final_point_valid = false;
  Complex final_point{0.0, 0.0};  // boundary point attaining eta
  double initial_perturbation = 0.0;  // direct-extended initial level offset

  Tolerances tol;
};

/// Improved criss-cross abscissa solver (root-finding horizontal searches).
/// Assumes the problem was validated.
SolveReport svs_abscissa(const SvsProblem& problem);

/// Improved criss-cross radius solver with random-direction escape.
SolveReport svs_radius(const SvsProblem& problem);

/// Directly-extended variants (eigenvalue-based horizontal/radial searches
/// with the interval-splitting safeguard); dispatches on problem.mode.
SolveReport svs_direct_extended(const SvsProblem& problem);

/// Validates, then dispatches on problem.mode and options.method.
SolveReport svs_solve(const SvsProblem& problem);

enum class MembershipResult { Inside, Outside, OnBoundary };

/// ||G(lambda)|| against eps^{-1} with a relative boundary band; eigenvalues
/// of (A, E) are inside by definition.
MembershipResult membership(const SvsProblem& problem, Complex lambda);

}  // namespace svset
