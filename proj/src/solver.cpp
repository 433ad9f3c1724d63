#include "svset/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace svset {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SolveContext {
  const SvsProblem& problem;
  TransferEvaluator ev;
  SearchCounters counters;
  std::mt19937_64 rng;
  SolveReport report;
  bool is_real = false;

  explicit SolveContext(const SvsProblem& p)
      : problem(p), ev(p.system, p.options), rng(p.options.rng_seed) {
    is_real = p.system.is_real_valued();
    report.mode = p.mode;
    report.method = p.options.method;
    report.epsilon = p.epsilon;
    report.seed = p.options.rng_seed;
    report.tol = p.options.tol;
  }

  void note(const std::string& msg) {
    for (const std::string& d : report.diagnostics)
      if (d == msg) return;
    report.diagnostics.push_back(msg);
  }

  void note_search(const FastSearchResult& fs) {
    if (fs.nudge_cap_hit) note("nudge-cap-hit");
    if (fs.hit_iteration_cap) note("root-search-iteration-cap");
  }

  FastSearchResult search(double eta, const std::vector<double>& candidates) {
    FastSearchResult fs =
        fast_search(ev, problem.mode, problem.epsilon, eta, candidates,
                    problem.options.tol, problem.options.max_root_iterations, &counters);
    note_search(fs);
    return fs;
  }

  std::vector<double> random_angles() {
    std::uniform_real_distribution<double> dist(0.0, kTwoPi);
    std::vector<double> out(static_cast<size_t>(std::max(1, problem.options.random_angles)));
    for (double& a : out) a = dist(rng);
    return out;
  }

  void set_final_point(double eta, double psi) {
    report.final_point_valid = true;
    report.final_point = problem.mode == Mode::Abscissa ? Complex(eta, psi)
                                                        : eta * std::polar(1.0, psi);
  }

  void advance(double eta, const FastSearchResult& fs) {
    report.iterates.push_back(eta);
    if (fs.psi_best) set_final_point(eta, *fs.psi_best);
  }

  void finalize() {
    report.eta = report.iterates.empty() ? 0.0 : report.iterates.back();
    report.eig_solves = counters.eig_solves;
    report.svd_evals = ev.svd_count();
    report.level_searches = counters.level_searches;
    report.line_searches = counters.line_searches;
    report.root_searches_solved = counters.root_searches_solved;
    report.root_searches_requested = counters.root_searches_requested;
  }
};

// Classification plus the eta = infinity fast path (Algorithm 1/2 preamble).
// Returns false when the solve is already decided (infinite eta).
bool initialize_lambda0(SolveContext& ctx, Complex& lambda0) {
  std::vector<ClassifiedEigenvalue> spec = classify_spectrum(ctx.problem.system);
  std::optional<Complex> l0 =
      initial_point(spec, ctx.problem.inclusion, ctx.problem.mode);
  if (!l0) {
    ctx.report.eta_infinite = true;
    ctx.report.converged = true;
    ctx.report.iterates.push_back(kInf);
    return false;
  }
  lambda0 = *l0;
  return true;
}

std::vector<double> launchable_midpoints(const std::vector<CrossSection>& sections) {
  std::vector<double> out;
  for (const CrossSection& s : sections)
    if (s.length() > 0.0) out.push_back(s.midpoint());
  return out;
}

SolveReport improved_abscissa(SolveContext& ctx) {
  const SvsProblem& pb = ctx.problem;
  Complex lambda0;
  if (!initialize_lambda0(ctx, lambda0)) {
    ctx.finalize();
    return ctx.report;
  }

  double eta = lambda0.real();
  // Real-axis warm start: cheaper real-valued root problem first, then the
  // root problem through lambda0 (a pole) is usually skippable.
  if (pb.options.real_axis_warm_start && ctx.is_real && lambda0.imag() != 0.0) {
    FastSearchResult fs = ctx.search(eta, {0.0});
    if (fs.progressed) {
      eta = fs.eta;
      ctx.set_final_point(eta, 0.0);
    }
  }
  FastSearchResult fs0 = ctx.search(eta, {lambda0.imag()});
  if (fs0.progressed) eta = fs0.eta;
  ctx.report.iterates.push_back(eta);
  if (fs0.psi_best) ctx.set_final_point(eta, *fs0.psi_best);

  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  for (int it = 0; it < pb.options.max_iterations; ++it) {
    ctx.report.iterations = it + 1;
    ctx.counters.level_searches += 1;
    BoundaryPointSet pts = vertical_boundary_points(pb, eta, &ctx.counters);
    std::vector<CrossSection> secs = prune_conjugates(
        assemble_vertical(pts, ctx.ev, pb.epsilon, pb.options.tol.membership_band),
        ctx.is_real);
    std::vector<double> psis = launchable_midpoints(secs);
    if (psis.empty()) {
      ctx.report.converged = true;
      break;
    }
    FastSearchResult fs = ctx.search(eta, psis);
    if (fs.eta > eta) {
      eta = fs.eta;
      ctx.advance(eta, fs);
      continue;
    }
    // Stagnation cross-check: one extra vertical search with jittered
    // midpoints before declaring convergence.
    ctx.counters.level_searches += 1;
    BoundaryPointSet pts2 = vertical_boundary_points(pb, eta, &ctx.counters);
    std::vector<CrossSection> secs2 = prune_conjugates(
        assemble_vertical(pts2, ctx.ev, pb.epsilon, pb.options.tol.membership_band),
        ctx.is_real);
    std::vector<double> psis2;
    for (const CrossSection& s : secs2)
      if (s.length() > 0.0) psis2.push_back(s.midpoint() + jitter(ctx.rng) * s.length());
    if (!psis2.empty()) {
      FastSearchResult fs2 = ctx.search(eta, psis2);
      if (fs2.eta > eta) {
        eta = fs2.eta;
        ctx.advance(eta, fs2);
        continue;
      }
    }
    ctx.report.converged = true;
    break;
  }
  if (!ctx.report.converged) ctx.note("max-iterations-reached");
  ctx.finalize();
  return ctx.report;
}

SolveReport improved_radius(SolveContext& ctx) {
  const SvsProblem& pb = ctx.problem;
  Complex lambda0;
  if (!initialize_lambda0(ctx, lambda0)) {
    ctx.finalize();
    return ctx.report;
  }

  double eta = std::abs(lambda0);
  if (pb.options.real_axis_warm_start && ctx.is_real && lambda0.imag() != 0.0) {
    FastSearchResult fs = ctx.search(eta, {0.0, std::numbers::pi});
    if (fs.progressed) {
      eta = fs.eta;
      if (fs.psi_best) ctx.set_final_point(eta, *fs.psi_best);
    }
  }
  std::vector<double> init = ctx.random_angles();
  init.insert(init.begin(), std::arg(lambda0));
  FastSearchResult fs0 = ctx.search(eta, init);
  if (fs0.progressed) eta = fs0.eta;
  ctx.report.iterates.push_back(eta);
  if (fs0.psi_best) ctx.set_final_point(eta, *fs0.psi_best);

  int consecutive_no_arc = 0;
  for (int it = 0; it < pb.options.max_iterations; ++it) {
    ctx.report.iterations = it + 1;
    ctx.counters.level_searches += 1;
    BoundaryPointSet pts = circle_boundary_points(pb, eta, &ctx.counters);
    if (pts.suspected_singular) ctx.note("suspected-singular-pencil");
    std::vector<CrossSection> arcs = prune_conjugates(
        assemble_circular(pts, ctx.ev, pb.epsilon, pb.options.tol.membership_band),
        ctx.is_real);
    std::vector<double> psis =
        pts.suspected_singular ? std::vector<double>() : launchable_midpoints(arcs);

    if (!psis.empty()) {
      consecutive_no_arc = 0;
      FastSearchResult fs = ctx.search(eta, psis);
      if (fs.eta > eta) {
        eta = fs.eta;
        ctx.advance(eta, fs);
        continue;
      }
      // Arcs made no progress: distinguish convergence from a problematic
      // search with one random-direction escape round.
      ctx.report.escape_events += 1;
      FastSearchResult esc = ctx.search(eta, ctx.random_angles());
      if (esc.eta > eta) {
        eta = esc.eta;
        ctx.advance(eta, esc);
        continue;
      }
      ctx.report.converged = true;
      break;
    }

    consecutive_no_arc += 1;
    if (consecutive_no_arc > 10) {
      ctx.report.converged = true;
      ctx.note("escape-round-cap-hit");
      break;
    }
    ctx.report.escape_events += 1;
    FastSearchResult esc = ctx.search(eta, ctx.random_angles());
    if (esc.eta > eta) {
      eta = esc.eta;
      ctx.advance(eta, esc);
      continue;
    }
    ctx.report.converged = true;
    break;
  }
  if (!ctx.report.converged) ctx.note("max-iterations-reached");
  ctx.finalize();
  return ctx.report;
}

// Eigenvalue-based horizontal search: all boundary points on the horizontal
// line through psi via one rotated-pencil eigensolve; rightmost taken.
std::optional<double> de_horizontal_extreme(SolveContext& ctx, double psi) {
  ctx.counters.line_searches += 1;
  ctx.counters.root_searches_requested += 1;
  ctx.counters.root_searches_solved += 1;
  BoundaryPointSet lb = line_boundary_points(ctx.problem, 0.0, psi, &ctx.counters);
  if (lb.ordinates.empty()) return std::nullopt;
  return lb.ordinates.back();
}

// Radial search along angle psi: outermost boundary point on the outward ray.
std::optional<double> de_radial_extreme(SolveContext& ctx, double psi) {
  ctx.counters.line_searches += 1;
  ctx.counters.root_searches_requested += 1;
  ctx.counters.root_searches_solved += 1;
  BoundaryPointSet lb = line_boundary_points(ctx.problem, psi, 0.0, &ctx.counters);
  std::optional<double> best;
  for (double w : lb.ordinates)
    if (w > 0.0 && (!best || w > *best)) best = w;
  return best;
}

SolveReport de_abscissa(SolveContext& ctx) {
  const SvsProblem& pb = ctx.problem;
  Complex lambda0;
  if (!initialize_lambda0(ctx, lambda0)) {
    ctx.finalize();
    return ctx.report;
  }

  double eta = lambda0.real();
  std::optional<double> last_best;
  double first_offset = 0.0;
  if (pb.options.start_with_level_search) {
    // The initial vertical search cannot pass exactly through an eigenvalue.
    first_offset = std::max(1e-8, 1e-8 * std::abs(lambda0));
    ctx.report.initial_perturbation = first_offset;
  } else {
    std::optional<double> w = de_horizontal_extreme(ctx, lambda0.imag());
    if (w && *w > eta) {
      eta = *w;
      last_best = lambda0.imag();
      ctx.set_final_point(eta, lambda0.imag());
    } else if (!w) {
      ctx.note("suspected-rounding:initial-horizontal-search-empty");
    }
  }
  ctx.report.iterates.push_back(eta);

  for (int it = 0; it < pb.options.max_iterations; ++it) {
    ctx.report.iterations = it + 1;
    const double x = eta + (it == 0 ? first_offset : 0.0);
    ctx.counters.level_searches += 1;
    BoundaryPointSet pts = vertical_boundary_points(pb, x, &ctx.counters);
    std::vector<CrossSection> secs = split_safeguard(
        prune_conjugates(
            assemble_vertical(pts, ctx.ev, pb.epsilon, pb.options.tol.membership_band),
            ctx.is_real),
        last_best, pb.options.tol.split_rel);
    std::vector<double> psis = launchable_midpoints(secs);
    if (psis.empty()) {
      if (pts.ordinates.empty() && it > 0)
        ctx.note("suspected-rounding:level-search-found-no-boundary-points");
      ctx.report.converged = true;
      break;
    }
    double best = eta;
    std::optional<double> best_psi;
    for (double psi : psis) {
      std::optional<double> w = de_horizontal_extreme(ctx, psi);
      if (!w) {
        ctx.note("suspected-rounding:horizontal-search-empty");
        continue;
      }
      if (*w > best) {
        best = *w;
        best_psi = psi;
      }
    }
    if (best_psi) {
      eta = best;
      last_best = *best_psi;
      ctx.report.iterates.push_back(eta);
      ctx.set_final_point(eta, *best_psi);
      continue;
    }
    ctx.report.converged = true;
    break;
  }
  if (!ctx.report.converged) ctx.note("max-iterations-reached");

  if (ctx.report.final_point_valid) {
    const double sigma = ctx.ev.norm_value(ctx.report.final_point);
    if (sigma > pb.gamma() * (1.0 + 1e-7))
      ctx.note("suspected-rounding:final-point-strictly-inside");
  }
  ctx.finalize();
  return ctx.report;
}

SolveReport de_radius(SolveContext& ctx) {
  const SvsProblem& pb = ctx.problem;
  Complex lambda0;
  if (!initialize_lambda0(ctx, lambda0)) {
    ctx.finalize();
    return ctx.report;
  }

  double eta = std::abs(lambda0);
  const double theta0 = std::arg(lambda0);
  double theta_bd = theta0;
  std::optional<double> last_best;

  // Initial radial search along the full line through lambda0 (outermost
  // boundary point in either direction).
  {
    ctx.counters.line_searches += 1;
    ctx.counters.root_searches_requested += 1;
    ctx.counters.root_searches_solved += 1;
    BoundaryPointSet lb = line_boundary_points(pb, theta0, 0.0, &ctx.counters);
    std::optional<double> w;
    for (double o : lb.ordinates)
      if (!w || std::abs(o) > std::abs(*w)) w = o;
    if (w && std::abs(*w) > eta) {
      eta = std::abs(*w);
      theta_bd = *w > 0.0 ? theta0 : theta0 + std::numbers::pi;
      if (theta_bd >= kTwoPi) theta_bd -= kTwoPi;
      last_best = theta_bd;
      ctx.set_final_point(eta, theta_bd);
    } else if (!w) {
      ctx.note("suspected-rounding:initial-radial-search-empty");
    }
  }
  ctx.report.iterates.push_back(eta);

  // First-circle perturbation: move just outside along theta_bd when the
  // computed boundary point sits strictly inside due to rounding.
  double first_radius = eta;
  {
    DerivativeBundle b = ctx.ev.derivatives_radial(eta, theta_bd, false);
    const double gamma = pb.gamma();
    if (!b.pole && b.value - gamma > 0.0 && b.first != 0.0) {
      const double delta0 = -(b.value - gamma) / b.first;
      if (delta0 > 0.0 && std::isfinite(delta0)) {
        bool moved = false;
        for (int k = 1; k <= 50; ++k) {
          const double r = eta + k * delta0;
          if (ctx.ev.norm_value(r * std::polar(1.0, theta_bd)) < gamma) {
            first_radius = r;
            ctx.report.initial_perturbation = r - eta;
            moved = true;
            break;
          }
        }
        if (!moved) ctx.note("first-circle-perturbation-cap-hit");
      }
    }
  }

  for (int it = 0; it < pb.options.max_iterations; ++it) {
    ctx.report.iterations = it + 1;
    const double r = it == 0 ? first_radius : eta;
    ctx.counters.level_searches += 1;
    BoundaryPointSet pts = circle_boundary_points(pb, r, &ctx.counters);
    if (pts.suspected_singular) ctx.note("suspected-singular-pencil");
    std::vector<CrossSection> arcs = split_safeguard(
        prune_conjugates(
            assemble_circular(pts, ctx.ev, pb.epsilon, pb.options.tol.membership_band),
            ctx.is_real),
        last_best, pb.options.tol.split_rel);
    std::vector<double> psis = launchable_midpoints(arcs);
    if (psis.empty()) {
      if (pts.ordinates.empty() && it > 0)
        ctx.note("suspected-rounding:level-search-found-no-boundary-points");
      ctx.report.converged = true;
      break;
    }
    double best = eta;
    std::optional<double> best_psi;
    for (double psi : psis) {
      std::optional<double> w = de_radial_extreme(ctx, psi);
      if (!w) {
        ctx.note("suspected-rounding:radial-search-empty");
        continue;
      }
      if (*w > best) {
        best = *w;
        best_psi = psi;
      }
    }
    if (best_psi) {
      eta = best;
      last_best = *best_psi;
      ctx.report.iterates.push_back(eta);
      ctx.set_final_point(eta, *best_psi);
      continue;
    }
    ctx.report.converged = true;
    break;
  }
  if (!ctx.report.converged) ctx.note("max-iterations-reached");

  // Cheap self-check mirroring the accuracy failures eigenvalue-based
  // searches can hit: a final point still strictly inside the set.
  if (ctx.report.final_point_valid) {
    const double sigma = ctx.ev.norm_value(ctx.report.final_point);
    if (sigma > pb.gamma() * (1.0 + 1e-7))
      ctx.note("suspected-rounding:final-point-strictly-inside");
  }
  ctx.finalize();
  return ctx.report;
}

}  // namespace

SolveReport svs_abscissa(const SvsProblem& problem) {
  SolveContext ctx(problem);
  ctx.report.method = Method::Improved;
  return improved_abscissa(ctx);
}

SolveReport svs_radius(const SvsProblem& problem) {
  SolveContext ctx(problem);
  ctx.report.method = Method::Improved;
  return improved_radius(ctx);
}

SolveReport svs_direct_extended(const SvsProblem& problem) {
  SolveContext ctx(problem);
  ctx.report.method = Method::DirectExtended;
  SolveReport rep = problem.mode == Mode::Abscissa ? de_abscissa(ctx) : de_radius(ctx);
  return rep;
}

SolveReport svs_solve(const SvsProblem& problem) {
  validate(problem);
  if (problem.options.method == Method::DirectExtended)
    return svs_direct_extended(problem);
  return problem.mode == Mode::Abscissa ? svs_abscissa(problem) : svs_radius(problem);
}

MembershipResult membership(const SvsProblem& problem, Complex lambda) {
  TransferEvaluator ev(problem.system, problem.options, /*expected_evaluations=*/1);
  const double sigma = ev.norm_value(lambda);
  const double gamma = problem.gamma();
  if (std::isinf(sigma)) return MembershipResult::Inside;
  if (std::abs(sigma - gamma) <= problem.options.tol.boundary_band * gamma)
    return MembershipResult::OnBoundary;
  return sigma > gamma ? MembershipResult::Inside : MembershipResult::Outside;
}

}  // namespace svset
