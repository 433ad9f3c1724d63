#include "svset/rootfind.hpp"

#include <algorithm>
#include <cmath>

namespace svset {

namespace {

std::optional<double> newton_step(const FnEval& e) {
  if (e.pole || !std::isfinite(e.f) || e.df == 0.0 || !std::isfinite(e.df))
    return std::nullopt;
  const double s = -e.f / e.df;
  return std::isfinite(s) ? std::optional<double>(s) : std::nullopt;
}

// True Halley step on f; falls back to Newton when the second derivative is
// unavailable or the denominator degenerates.
std::optional<double> halley_step(const FnEval& e) {
  std::optional<double> n = newton_step(e);
  if (!e.ddf || e.degenerate) return n;
  const double den = 2.0 * e.df * e.df - e.f * (*e.ddf);
  if (den == 0.0 || !std::isfinite(den)) return n;
  const double s = -2.0 * e.f * e.df / den;
  return std::isfinite(s) ? std::optional<double>(s) : n;
}

FnEval to_fneval(const DerivativeBundle& b, double gamma) {
  FnEval e;
  e.pole = b.pole;
  e.f = b.pole ? kInf : b.value - gamma;
  e.df = b.first;
  e.degenerate = b.degenerate;
  if (b.second) e.ddf = b.second;
  return e;
}

}  // namespace

RootResult find_root_to_the_right(const ScalarFn& fn, double x0,
                                  std::optional<FnEval> f_at_x0,
                                  const RootOptions& opts) {
  RootResult out;
  auto eval = [&](double t) {
    ++out.evals;
    return fn(t);
  };

  FnEval b0 = f_at_x0 ? *f_at_x0 : eval(x0);
  if (!(b0.f > 0.0)) {
    // Contract violation (caller checks f(x0) > 0); nothing to do.
    out.root = x0;
    out.at_root = b0;
    out.status = RootResult::Status::Stalled;
    return out;
  }

  // Bracket phase: x stays the lower bound through poles and positives.
  double lo = x0, hi = 0.0;
  bool have_hi = false;
  double x = x0;
  FnEval bx = b0;
  FnEval b_hi;
  bool first = true;
  for (int it = 0; it < opts.max_iter && !have_hi; ++it) {
    std::optional<double> h = halley_step(bx);
    double growth = std::max(h ? 2.0 * std::abs(*h) : 0.0, x - x0);
    if (first) {
      growth = std::max(growth, std::max(1e-6, 0.01 * std::abs(x0)));
      first = false;
    }
    if (!(growth > 0.0) || !std::isfinite(growth))
      growth = std::max(1e-6, 0.01 * std::max(std::abs(x), 1.0));
    const double xn = x + growth;
    if (!std::isfinite(xn)) break;
    FnEval bn = eval(xn);
    x = xn;
    bx = bn;
    if (bn.f > 0.0) {
      lo = xn;
    } else if (bn.f < 0.0) {
      hi = xn;
      b_hi = bn;
      have_hi = true;
    } else {
      out.root = xn;
      out.at_root = bn;
      out.delta = halley_step(bn).value_or(0.0);
      return out;
    }
  }
  if (!have_hi) {
    out.root = lo;
    out.at_root = bx;
    out.status = RootResult::Status::MaxIter;
    return out;
  }

  // Refine phase: safeguarded Halley inside [lo, hi], f(lo) > 0 > f(hi).
  double xc = hi;
  FnEval bc = b_hi;
  double best_x = hi;
  FnEval best = b_hi;
  bool force_bisect = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    if (std::isfinite(bc.f) && std::abs(bc.f) < std::abs(best.f)) {
      best_x = xc;
      best = bc;
    }
    if (std::isfinite(bc.f) && std::abs(bc.f) <= opts.f_tol_abs) {
      out.root = xc;
      out.at_root = bc;
      out.delta = halley_step(bc).value_or(0.0);
      return out;
    }
    if (hi - lo <= opts.bracket_rel * std::max(1.0, std::abs(xc))) {
      out.root = best_x;
      out.at_root = best;
      out.delta = halley_step(best).value_or(0.0);
      return out;
    }
    if (hi - lo <= 4.0 * kEpsMach * std::max(1.0, std::abs(xc))) {
      out.root = best_x;
      out.at_root = best;
      out.delta = halley_step(best).value_or(0.0);
      out.status = RootResult::Status::Stalled;
      return out;
    }

    double cand;
    std::optional<double> h = force_bisect ? std::nullopt : halley_step(bc);
    if (h) {
      cand = xc + *h;
      if (!(cand > lo) || !(cand < hi)) cand = 0.5 * (lo + hi);
    } else {
      cand = 0.5 * (lo + hi);
    }
    const double width_before = hi - lo;
    FnEval bcand = eval(cand);
    xc = cand;
    bc = bcand;
    if (bcand.f > 0.0) {
      lo = cand;
    } else if (bcand.f < 0.0) {
      hi = cand;
    } else {
      out.root = cand;
      out.at_root = bcand;
      out.delta = halley_step(bcand).value_or(0.0);
      return out;
    }
    force_bisect = (hi - lo) > 0.75 * width_before;
  }
  out.root = best_x;
  out.at_root = best;
  out.delta = halley_step(best).value_or(0.0);
  out.status = RootResult::Status::MaxIter;
  return out;
}

std::vector<PriorityStep> priority_steps(const TransferEvaluator& ev, Mode mode,
                                         double epsilon, double eta,
                                         const std::vector<double>& candidates,
                                         StepOrder order, bool want_second) {
  const double gamma = 1.0 / epsilon;
  std::vector<PriorityStep> out;
  out.reserve(candidates.size());
  for (size_t k = 0; k < candidates.size(); ++k) {
    DerivativeBundle b = mode == Mode::Abscissa
                             ? ev.derivatives_horizontal(eta, candidates[k], want_second)
                             : ev.derivatives_radial(eta, candidates[k], want_second);
    PriorityStep ps;
    ps.index = static_cast<int>(k);
    ps.bundle = b;
    const double f = b.pole ? kInf : b.value - gamma;
    if (b.pole || (f > 0.0 && b.first >= 0.0)) {
      // Inside with the norm not decreasing rightward: the set extends at
      // least until sigma turns, so this line gets maximal priority.
      ps.step = kInf;
    } else if (b.first == 0.0) {
      ps.step = 0.0;
    } else {
      const double nstep = -f / b.first;
      double step = nstep;
      if (order == StepOrder::Halley && b.second && !b.degenerate) {
        const double den = 2.0 * b.first * b.first - b.value * (*b.second);
        if (den != 0.0 && std::isfinite(den)) {
          const double hstep = -2.0 * b.value * b.first / den;
          if (std::isfinite(hstep)) step = hstep;
        }
      }
      ps.step = step;
    }
    out.push_back(std::move(ps));
  }
  return out;
}

FastSearchResult fast_search(const TransferEvaluator& ev, Mode mode, double epsilon,
                             double eta0, const std::vector<double>& candidates,
                             const Tolerances& tol, int max_root_iter,
                             SearchCounters* counters) {
  const double gamma = 1.0 / epsilon;
  FastSearchResult res;
  res.eta = eta0;
  res.requested = static_cast<int>(candidates.size());
  if (counters) counters->root_searches_requested += res.requested;
  if (candidates.empty()) return res;

  const bool want_second = ev.second_derivatives_enabled();
  std::vector<PriorityStep> steps =
      priority_steps(ev, mode, epsilon, eta0, candidates,
                     want_second ? StepOrder::Halley : StepOrder::Newton, want_second);
  std::stable_sort(steps.begin(), steps.end(),
                   [](const PriorityStep& a, const PriorityStep& b) {
                     if (a.step != b.step) return a.step > b.step;
                     return a.index < b.index;
                   });

  RootOptions ropts;
  ropts.f_tol_abs = tol.root_f * gamma;
  ropts.bracket_rel = tol.root_bracket;
  ropts.max_iter = max_root_iter;

  double x = eta0;
  std::optional<double> psi;
  std::optional<double> delta;
  std::optional<ScalarFn> winner_fn;
  FnEval winner_eval;

  for (const PriorityStep& ps : steps) {
    const double cand = candidates[static_cast<size_t>(ps.index)];
    ScalarFn fn = [&ev, mode, cand, gamma, want_second](double t) {
      DerivativeBundle b = mode == Mode::Abscissa
                               ? ev.derivatives_horizontal(t, cand, want_second)
                               : ev.derivatives_radial(t, cand, want_second);
      FnEval e;
      e.pole = b.pole;
      e.f = b.pole ? kInf : b.value - gamma;
      e.df = b.first;
      e.degenerate = b.degenerate;
      if (b.second) e.ddf = b.second;
      return e;
    };
    // The priority pass already evaluated f at eta0; reuse it while x is
    // still there, otherwise probe the current best point.
    FnEval fx;
    if (x == eta0) {
      fx = FnEval{ps.bundle.pole ? kInf : ps.bundle.value - gamma, ps.bundle.first,
                  ps.bundle.second, ps.bundle.degenerate, ps.bundle.pole};
    } else {
      fx = fn(x);
    }
    if (fx.f > 0.0) {
      RootResult rr = find_root_to_the_right(fn, x, fx, ropts);
      ++res.solved;
      if (counters) counters->root_searches_solved += 1;
      if (rr.status != RootResult::Status::Converged) res.hit_iteration_cap = true;
      x = rr.root;
      delta = rr.delta;
      psi = cand;
      winner_fn = fn;
      winner_eval = rr.at_root;
    }
  }

  // Ensure the computed rightmost root is not just inside the interior.
  if (psi && delta && winner_eval.f > 0.0) {
    double d = std::min(std::abs(*delta), std::abs(x) * kEpsMach);
    bool moved = false;
    for (int k = 1; k <= 50; ++k) {
      const double xk = x + static_cast<double>(k) * d;
      if ((*winner_fn)(xk).f <= 0.0) {
        x = xk;
        moved = true;
        break;
      }
    }
    if (!moved) res.nudge_cap_hit = true;
  }

  res.eta = x;
  res.psi_best = psi;
  res.progressed = x > eta0;
  return res;
}

}  // namespace svset
