#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "svset/types.hpp"

namespace svset {

/// Full SVD, singular values in descending order, U and V square unitary.
struct SvdResult {
  RealVector sigma;
  Matrix U;
  Matrix V;
};

/// Generalized eigenvalue of a pencil (M, N): M x = lambda N x.
/// Infinite eigenvalues (beta == 0) carry a flag instead of a large float.
struct GenEigenvalue {
  Complex value{0.0, 0.0};
  bool infinite = false;
  bool indeterminate = false;  // alpha == beta == 0, singular-pencil symptom
};

struct GeneralizedEigs {
  std::vector<GenEigenvalue> values;
  Matrix left;   // columns y with y^* M = lambda y^* N (empty unless requested)
  Matrix right;  // columns x with M x = lambda N x
};

SvdResult svd_full(const Matrix& M);

/// Largest singular value only; cheaper than svd_full when vectors are not needed.
double spectral_norm(const Matrix& M);

/// (sigma_min, u_min, v_min) of a square matrix.
struct SmallestSingular {
  double sigma;
  Vector u;
  Vector v;
};
SmallestSingular smallest_singular_value(const Matrix& M);

GeneralizedEigs generalized_eigs(const Matrix& M, const Matrix& N,
                                 bool want_vectors = false);

/// Hessenberg-triangular reduction A = Q H Z^*, E = Q T Z^* with H upper
/// Hessenberg, T upper triangular, Q and Z unitary.
struct HessTriangular {
  Matrix H;
  Matrix T;
  Matrix Q;
  Matrix Z;
};
HessTriangular hessenberg_triangular(const Matrix& A, const Matrix& E);

/// Caches whatever is needed to apply (lambda E - A)^{-1} repeatedly.
///
/// Two modes: lu-per-point refactorizes lambda E - A at each new lambda;
/// hessenberg-precomputed does a one-time reduction so every per-lambda solve
/// touches only Hessenberg-structured data (O(n^2) per right-hand side).
class ResolventFactorization {
 public:
  enum class Mode { LuPerPoint, HessenbergPrecomputed };

  ResolventFactorization() = default;  // empty; assign from build()
  static ResolventFactorization build(const Matrix& A, const Matrix& E, Mode mode);

  Mode mode() const { return mode_; }
  Eigen::Index size() const { return n_; }

  /// The matrix sitting between the two resolvent applications in derivative
  /// formulas: E itself in LU mode, T in Hessenberg mode.
  const Matrix& middle() const;
  /// B expressed in the reduced coordinates (Q^* B in Hessenberg mode).
  Matrix reduce_input(const Matrix& B) const;
  /// C expressed in the reduced coordinates (C Z in Hessenberg mode).
  Matrix reduce_output(const Matrix& C) const;
  /// Maps reduced-coordinate left/right singular vectors of lambda*T - H back
  /// to the original coordinates (identity in LU mode).
  Matrix left_to_original(const Matrix& u) const;
  Matrix right_to_original(const Matrix& v) const;

  /// Per-lambda handle. Holds one factorization of W = lambda E - A (LU mode)
  /// or W = lambda T - H (Hessenberg mode); solve() may be called repeatedly.
  class Point {
   public:
    bool pole() const { return pole_; }
    const Matrix& matrix() const { return W_; }  // the reduced W itself
    Matrix solve(const Matrix& rhs) const;       // W^{-1} rhs

   private:
    friend class ResolventFactorization;
    Matrix W_;
    bool pole_ = false;
    bool hess_ = false;
    // LU mode
    std::shared_ptr<void> lu_;
    // Hessenberg mode: Givens-QR of W
    Matrix R_;
    std::vector<std::pair<double, Complex>> givens_;  // (c, s) per subdiagonal
  };

  Point at(Complex lambda) const;

 private:
  Mode mode_ = Mode::LuPerPoint;
  Eigen::Index n_ = 0;
  Matrix A_, E_;        // LU mode
  HessTriangular red_;  // Hessenberg mode
};

/// (lambda E - A)^{-1} X in the original coordinates. Throws PoleProximity on
/// an exactly singular solve.
Matrix resolvent_apply(const ResolventFactorization& fact, Complex lambda,
                       const Matrix& X);

}  // namespace svset
