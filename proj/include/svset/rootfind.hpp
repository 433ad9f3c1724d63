#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "svset/pencils.hpp"
#include "svset/transfer.hpp"

namespace svset {

/// One evaluation of a scalar root objective f with derivatives. pole means f
/// did not return a finite value (+inf; treated as strictly inside the set).
struct FnEval {
  double f = 0.0;
  double df = 0.0;
  std::optional<double> ddf;
  bool degenerate = false;
  bool pole = false;
};

using ScalarFn = std::function<FnEval(double)>;

struct RootOptions {
  double f_tol_abs = 1e-12;    // |f(r)| <= f_tol_abs
  double bracket_rel = 1e-15;  // bracket width <= bracket_rel * max(1, |r|)
  int max_iter = 100;
};

struct RootResult {
  enum class Status { Converged, MaxIter, Stalled };
  double root = 0.0;
  double delta = 0.0;  // the would-be next Newton/Halley step at root
  int evals = 0;
  Status status = Status::Converged;
  FnEval at_root;
};

/// Bracketed hybrid Newton/Halley root finder. Given f(x0) > 0, grows the
/// guess (first increase at least max(1e-6, 0.01|x0|), then by
/// max(2 |Halley step|, x - x0)) until f < 0, updating the lower bound through
/// poles, then refines inside the bracket with Halley steps (Newton under
/// degeneracy), bisecting whenever a step leaves the bracket or shrinks it by
/// less than 25%.
RootResult find_root_to_the_right(const ScalarFn& f, double x0,
                                  std::optional<FnEval> f_at_x0,
                                  const RootOptions& opts);

enum class StepOrder { Newton, Halley };

/// Initial Newton/Halley steps used to order the root subproblems:
/// N_k = -(sigma - eps^{-1}) / sigma';  H_k = -2 sigma sigma' / (2 sigma'^2 -
/// sigma sigma''). Candidates inside the set with sigma' >= 0 (or at a pole)
/// get +inf priority; a vanishing Halley denominator falls back to N_k.
struct PriorityStep {
  double step = 0.0;
  DerivativeBundle bundle;
  int index = 0;
};
std::vector<PriorityStep> priority_steps(const TransferEvaluator& ev, Mode mode,
                                         double epsilon, double eta,
                                         const std::vector<double>& candidates,
                                         StepOrder order, bool want_second);

struct FastSearchResult {
  double eta = 0.0;
  std::optional<double> psi_best;
  int solved = 0;
  int requested = 0;
  bool progressed = false;
  bool nudge_cap_hit = false;
  bool hit_iteration_cap = false;  // some root solve returned max-iter/stalled
};

/// Subroutine-1 style prioritized, warm-started sequence of one-dimensional
/// root solves. Returns the rightmost (outermost) root encountered over the
/// candidate ordinates, nudged to lie on or just outside the set boundary.
FastSearchResult fast_search(const TransferEvaluator& ev, Mode mode, double epsilon,
                             double eta0, const std::vector<double>& candidates,
                             const Tolerances& tol, int max_root_iter,
                             SearchCounters* counters = nullptr);

}  // namespace svset
