#include "svset/system.hpp"

#include <cmath>

#include "svset/linalg.hpp"

namespace svset {

bool StateSpaceSystem::is_real_valued() const {
  auto real = [](const Matrix& M) { return (M.imag().array() == 0.0).all(); };
  return real(A) && real(B) && real(C) && real(D) && real(E);
}

StateSpaceSystem StateSpaceSystem::pseudospectral(const Matrix& A) {
  const Eigen::Index n = A.rows();
  StateSpaceSystem s;
  s.A = A;
  s.B = Matrix::Identity(n, n);
  s.C = Matrix::Identity(n, n);
  s.D = Matrix::Zero(n, n);
  s.E = Matrix::Identity(n, n);
  return s;
}

void validate(const SvsProblem& problem) {
  const StateSpaceSystem& s = problem.system;
  const Eigen::Index n = s.A.rows();
  if (n < 1 || s.A.cols() != n)
    throw SvsError(ErrorClass::DimensionMismatch, "A must be square and nonempty");
  if (s.E.rows() != n || s.E.cols() != n)
    throw SvsError(ErrorClass::DimensionMismatch, "E must match A (n x n)");
  if (s.B.rows() != n)
    throw SvsError(ErrorClass::DimensionMismatch, "B must have n rows");
  if (s.C.cols() != n)
    throw SvsError(ErrorClass::DimensionMismatch, "C must have n columns");
  if (s.D.rows() != s.C.rows() || s.D.cols() != s.B.cols())
    throw SvsError(ErrorClass::DimensionMismatch, "D must be p x m");
  if (!(problem.epsilon > 0.0) || !std::isfinite(problem.epsilon))
    throw SvsError(ErrorClass::BadArguments, "epsilon must be positive and finite");

  const double dnorm = spectral_norm(s.D);
  if (problem.epsilon * dnorm >= 1.0)
    throw SvsError(ErrorClass::EpsilonTooLarge,
                   "epsilon * ||D||_2 = " + std::to_string(problem.epsilon * dnorm) +
                       " >= 1; the spectral value set is unbounded");

  // Invertibility of E via a reciprocal condition estimate.
  SvdResult es = svd_full(s.E);
  const double smax = es.sigma(0);
  const double smin = es.sigma(es.sigma.size() - 1);
  const double rcond = (smax > 0.0) ? smin / smax : 0.0;
  if (!(rcond > 1e3 * kEpsMach))
    throw SvsError(ErrorClass::SingularE,
                   "E is singular to working precision (rcond estimate " +
                       std::to_string(rcond) +
                       "); if (A,E) is index 1, transform the system to an "
                       "equivalent representation with invertible E first");
}

std::vector<ClassifiedEigenvalue> classify_spectrum(const StateSpaceSystem& system,
                                                    double rel_tol) {
  GeneralizedEigs ge = generalized_eigs(system.A, system.E, /*want_vectors=*/true);
  const double bnorm = spectral_norm(system.B);
  const double cnorm = spectral_norm(system.C);
  const double tol = rel_tol;

  std::vector<ClassifiedEigenvalue> out(ge.values.size());
  for (size_t i = 0; i < ge.values.size(); ++i) {
    ClassifiedEigenvalue& ce = out[i];
    ce.value = ge.values[i].value;
    ce.infinite = ge.values[i].infinite;
    Vector x = ge.right.col(static_cast<Eigen::Index>(i));
    Vector y = ge.left.col(static_cast<Eigen::Index>(i));
    if (x.norm() > 0) x /= x.norm();
    if (y.norm() > 0) y /= y.norm();
    ce.observable = (system.C * x).norm() > tol * cnorm;
    ce.controllable = (system.B.adjoint() * y).norm() > tol * bnorm;
  }
  return out;
}

std::optional<Complex> initial_point(const std::vector<ClassifiedEigenvalue>& spectrum,
                                     Inclusion inclusion, Mode mode) {
  bool found = false;
  Complex best;
  double best_key = -kInf;
  for (const ClassifiedEigenvalue& ce : spectrum) {
    if (!ce.included(inclusion)) continue;
    if (ce.infinite) return std::nullopt;  // eta = infinity
    const double key = mode == Mode::Abscissa ? ce.value.real() : std::abs(ce.value);
    if (!found || key > best_key) {  // ties: first encountered wins
      found = true;
      best = ce.value;
      best_key = key;
    }
  }
  if (!found)
    throw SvsError(ErrorClass::EmptyAfterFilter,
                   "no eigenvalue of (A,E) meets the inclusion criteria");
  return best;
}

}  // namespace svset
