#pragma once

#include <atomic>
#include <memory>
#include <optional>

#include "svset/linalg.hpp"
#include "svset/system.hpp"

namespace svset {

/// Largest singular triplet of G(lambda) = C (lambda E - A)^{-1} B + D,
/// with the full spectrum attached when second derivatives were requested.
/// pole == true is the +infinity sentinel (lambda at or numerically on an
/// eigenvalue of (A,E)); sigma is +inf and the vectors are empty.
struct SingularTriplet {
  double sigma = 0.0;
  Vector u;  // length p
  Vector v;  // length m
  Complex lambda{0.0, 0.0};
  bool pole = false;
  std::optional<SvdResult> full_spectrum;
};

enum class Parameterization { Horizontal, Radial };

/// sigma, sigma', and optionally sigma'' of ||G|| along a one-parameter path.
struct DerivativeBundle {
  double value = 0.0;
  double first = 0.0;
  std::optional<double> second;
  Parameterization parameterization = Parameterization::Horizontal;
  double simple_gap = 0.0;  // sigma1 - sigma2, degeneracy diagnostics
  bool degenerate = false;  // gap below the simplicity threshold
  bool pole = false;        // +inf sentinel; value = +inf, derivatives invalid
};

/// Theorem-style second derivative of the largest singular value of a matrix
/// family G(t) at t = 0, from the full SVD of G(0) and the explicit first and
/// second derivative matrices. Returns nullopt when the largest singular value
/// is not numerically simple.
std::optional<double> second_derivative_hermitian(const SvdResult& G_svd,
                                                  const Matrix& dG, const Matrix& d2G,
                                                  double simplicity_tol = 1e-8);

/// Evaluates ||G(lambda)|| and its directional derivatives, counting every
/// evaluation (one per norm_at / derivatives_* call; derivatives reuse the
/// same factorization of lambda E - A).
class TransferEvaluator {
 public:
  /// expected_evaluations steers the Auto resolvent mode: the one-time
  /// Hessenberg reduction pays off past a handful (8) of evaluations.
  TransferEvaluator(const StateSpaceSystem& system, const SolverOptions& opts,
                    long expected_evaluations = 1000);

  EvalPath path() const { return path_; }
  ResolventFactorization::Mode resolvent_mode() const { return fact_.mode(); }
  long long svd_count() const { return svd_count_.load(); }
  Eigen::Index n() const { return sys_->n(); }

  SingularTriplet norm_at(Complex lambda, bool want_full = false) const;

  /// ||G(lambda)|| alone (no singular vectors); +inf at poles. Counts as one
  /// evaluation like norm_at.
  double norm_value(Complex lambda) const;

  DerivativeBundle derivatives_horizontal(double x, double y, bool want_second) const;
  DerivativeBundle derivatives_radial(double r, double theta, bool want_second) const;

  /// Whether sigma'' is computed by default (size policy + options).
  bool second_derivatives_enabled() const { return want_second_default_; }

  const StateSpaceSystem& system() const { return *sys_; }
  const ResolventFactorization& factorization() const { return fact_; }

 private:
  struct PointData;
  DerivativeBundle derivatives_at(Complex lambda, Complex dlambda,
                                  Parameterization param, bool want_second) const;

  const StateSpaceSystem* sys_;
  ResolventFactorization fact_;
  Matrix Br_, Cr_;  // B, C in the factorization's reduced coordinates
  EvalPath path_ = EvalPath::FullTransfer;
  bool want_second_default_ = true;
  double simplicity_tol_ = 1e-8;
  mutable std::atomic<long long> svd_count_{0};
};

}  // namespace svset
