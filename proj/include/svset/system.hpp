#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "svset/types.hpp"

namespace svset {

/// The quintuple (A, B, C, D, E) of E x' = A x + B u, y = C x + D u.
/// E is required to be invertible (checked by validate()).
struct StateSpaceSystem {
  Matrix A;  // n x n
  Matrix B;  // n x m
  Matrix C;  // p x n
  Matrix D;  // p x m
  Matrix E;  // n x n

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
  Eigen::Index p() const { return C.rows(); }

  /// True iff every imaginary part is exactly zero.
  bool is_real_valued() const;

  /// Pseudospectral quintuple: B = C = E = I, D = 0.
  static StateSpaceSystem pseudospectral(const Matrix& A);
};

enum class Mode { Abscissa, Radius };
enum class Method { Improved, DirectExtended };
enum class Inclusion { All, ControllableAndObservable };

struct Tolerances {
  double imag_eig = 1e-8;       // imaginary/unimodular eigenvalue filter
  double dedup = 1e-10;         // ordinate merge threshold (times scale)
  double root_f = 1e-12;        // |f(r)| <= root_f * eps^{-1}
  double root_bracket = 1e-15;  // bracket width <= root_bracket * max(1,|r|)
  double simplicity = 1e-8;     // sigma1 - sigma2 <= simplicity * max(sigma1,1)
  double split_rel = 1e-2;      // split-safeguard closeness, fraction of length
  double membership_band = 1e-12;  // midpoint test: >= eps^{-1} (1 - band)
  double ctrb_obsv = 1e-10;     // classification threshold (times ||B||/||C||)
  double boundary_band = 1e-10; // membership(): on-boundary half-width, relative
};

enum class EvalPath { Auto, SigmaMinShortcut, FullTransfer };
enum class ResolventMode { Auto, LuPerPoint, HessenbergPrecomputed };
enum class SecondDerivatives { Auto, On, Off };

struct SolverOptions {
  Method method = Method::Improved;
  bool start_with_level_search = true;  // direct-extended abscissa variant only
  int random_angles = 3;                // escape directions per round (radius)
  std::uint64_t rng_seed = 100;
  bool real_axis_warm_start = true;
  Tolerances tol;
  int max_iterations = 100;
  int max_root_iterations = 100;
  EvalPath eval_path = EvalPath::Auto;
  ResolventMode resolvent = ResolventMode::Auto;
  SecondDerivatives second_derivatives = SecondDerivatives::Auto;
  Eigen::Index second_deriv_size_cap = 64 * 64;  // compute sigma'' when m*p <= cap
};

struct SvsProblem {
  StateSpaceSystem system;
  double epsilon = 0.0;
  Inclusion inclusion = Inclusion::All;
  Mode mode = Mode::Abscissa;
  SolverOptions options;

  double gamma() const { return 1.0 / epsilon; }  // the level eps^{-1}
};

/// Checks dimensions, eps * ||D||_2 < 1, and that E is invertible (reciprocal
/// condition estimate above 1e3 * machine eps). Throws SvsError on failure.
void validate(const SvsProblem& problem);

struct ClassifiedEigenvalue {
  Complex value{0.0, 0.0};
  bool infinite = false;
  bool observable = false;
  bool controllable = false;

  bool included(Inclusion inc) const {
    return inc == Inclusion::All || (observable && controllable);
  }
};

/// Eigenvalues of (A, E) with controllability/observability flags, one
/// eigenvector per occurrence as returned by the backend. An eigenvalue is
/// unobservable iff ||C x|| <= rel_tol * ||C|| for its unit eigenvector x
/// (analogously for controllability).
std::vector<ClassifiedEigenvalue> classify_spectrum(const StateSpaceSystem& system,
                                                    double rel_tol = 1e-10);

/// Initialization point per the inclusion criteria: rightmost (abscissa) or
/// outermost (radius) included eigenvalue. An included infinite eigenvalue
/// signals eta = infinity (empty optional). Throws EmptyAfterFilter when no
/// eigenvalue meets the criteria.
std::optional<Complex> initial_point(const std::vector<ClassifiedEigenvalue>& spectrum,
                                     Inclusion inclusion, Mode mode);

}  // namespace svset
