#include "svset/transfer.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace svset {

namespace {

// Second derivative of the largest eigenvalue of H(t) = [[0, G],[G^*, 0]] at
// t = 0, assembled from the pairwise inner products instead of the explicit
// 2x2-block matrices. Inputs:
//   sigmas  singular values of G, descending (length q = min(p,m))
//   r(j) = u_1^* dG v_j  (length m), c(j) = u_j^* dG v_1  (length p)
//   a    = u_1^* d2G v_1
// Eigenvectors of H are [u_j; +/- v_j]/sqrt(2) for +/- sigma_j, plus the
// one-sided zero modes [u_j; 0] (p > m) or [0; v_j] (p < m).
double hermitian_second_from_parts(const RealVector& sigmas, const Vector& r,
                                   const Vector& c, Complex a, Eigen::Index p,
                                   Eigen::Index m) {
  const Eigen::Index q = sigmas.size();
  const double s1 = sigmas(0);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < q; ++j) {
    if (j > 0) {
      const Complex t = 0.5 * (r(j) + std::conj(c(j)));
      sum += std::norm(t) / (s1 - sigmas(j));
    }
    const Complex t = 0.5 * (-r(j) + std::conj(c(j)));
    sum += std::norm(t) / (s1 + sigmas(j));
  }
  if (p > m) {
    for (Eigen::Index j = q; j < p; ++j) sum += 0.5 * std::norm(c(j)) / s1;
  } else if (m > p) {
    for (Eigen::Index j = q; j < m; ++j) sum += 0.5 * std::norm(r(j)) / s1;
  }
  return a.real() + 2.0 * sum;
}

double gap_of(const RealVector& sigmas) {
  return sigmas.size() > 1 ? sigmas(0) - sigmas(1) : sigmas(0);
}

}  // namespace

std::optional<double> second_derivative_hermitian(const SvdResult& G_svd,
                                                  const Matrix& dG, const Matrix& d2G,
                                                  double simplicity_tol) {
  const double s1 = G_svd.sigma(0);
  if (gap_of(G_svd.sigma) <= simplicity_tol * std::max(s1, 1.0)) return std::nullopt;
  const Eigen::Index p = G_svd.U.rows();
  const Eigen::Index m = G_svd.V.rows();
  const Vector u1 = G_svd.U.col(0);
  const Vector v1 = G_svd.V.col(0);
  Vector r = (u1.adjoint() * dG * G_svd.V).transpose();  // r(j) = u_1^* dG v_j
  Vector c = G_svd.U.adjoint() * (dG * v1);              // c(j) = u_j^* dG v_1
  const Complex a = u1.dot(d2G * v1);
  return hermitian_second_from_parts(G_svd.sigma, r, c, a, p, m);
}

TransferEvaluator::TransferEvaluator(const StateSpaceSystem& system,
                                     const SolverOptions& opts,
                                     long expected_evaluations)
    : sys_(&system) {
  const Eigen::Index n = system.n();
  const bool shortcut_legal = system.B.rows() == n && system.B.cols() == n &&
                              system.C.rows() == n && system.C.cols() == n &&
                              (system.B - Matrix::Identity(n, n)).isZero(0.0) &&
                              (system.C - Matrix::Identity(n, n)).isZero(0.0) &&
                              system.D.isZero(0.0);
  switch (opts.eval_path) {
    case EvalPath::Auto:
      path_ = shortcut_legal ? EvalPath::SigmaMinShortcut : EvalPath::FullTransfer;
      break;
    case EvalPath::SigmaMinShortcut:
      if (!shortcut_legal)
        throw SvsError(ErrorClass::BadArguments,
                       "sigma-min shortcut requires B = C = I and D = 0");
      path_ = EvalPath::SigmaMinShortcut;
      break;
    case EvalPath::FullTransfer:
      path_ = EvalPath::FullTransfer;
      break;
  }

  ResolventFactorization::Mode mode;
  switch (opts.resolvent) {
    case ResolventMode::LuPerPoint:
      mode = ResolventFactorization::Mode::LuPerPoint;
      break;
    case ResolventMode::HessenbergPrecomputed:
      mode = ResolventFactorization::Mode::HessenbergPrecomputed;
      break;
    case ResolventMode::Auto:
    default:
      mode = expected_evaluations > 8 ? ResolventFactorization::Mode::HessenbergPrecomputed
                                      : ResolventFactorization::Mode::LuPerPoint;
      break;
  }
  fact_ = ResolventFactorization::build(system.A, system.E, mode);
  Br_ = fact_.reduce_input(system.B);
  Cr_ = fact_.reduce_output(system.C);

  simplicity_tol_ = opts.tol.simplicity;
  switch (opts.second_derivatives) {
    case SecondDerivatives::On: want_second_default_ = true; break;
    case SecondDerivatives::Off: want_second_default_ = false; break;
    case SecondDerivatives::Auto:
    default:
      want_second_default_ = sys_->m() * sys_->p() <= opts.second_deriv_size_cap;
      break;
  }
}

SingularTriplet TransferEvaluator::norm_at(Complex lambda, bool want_full) const {
  svd_count_.fetch_add(1, std::memory_order_relaxed);
  SingularTriplet out;
  out.lambda = lambda;

  ResolventFactorization::Point pt = fact_.at(lambda);
  if (pt.pole()) {
    out.pole = true;
    out.sigma = kInf;
    return out;
  }

  if (path_ == EvalPath::SigmaMinShortcut) {
    SvdResult svd = svd_full(pt.matrix());
    const Eigen::Index n = svd.sigma.size();
    const double smin = svd.sigma(n - 1);
    if (!(smin > 0.0) || !std::isfinite(smin)) {
      out.pole = true;
      out.sigma = kInf;
      return out;
    }
    out.sigma = 1.0 / smin;
    out.u = fact_.left_to_original(svd.V.col(n - 1));
    out.v = fact_.right_to_original(svd.U.col(n - 1));
    if (want_full) {
      SvdResult g;
      g.sigma = svd.sigma.reverse().cwiseInverse();
      g.U = fact_.left_to_original(svd.V.rowwise().reverse());
      g.V = fact_.right_to_original(svd.U.rowwise().reverse());
      out.full_spectrum = std::move(g);
    }
    return out;
  }

  Matrix G = Cr_ * pt.solve(Br_) + sys_->D;
  if (!G.allFinite()) {
    out.pole = true;
    out.sigma = kInf;
    return out;
  }
  SvdResult svd = svd_full(G);
  out.sigma = svd.sigma(0);
  out.u = svd.U.col(0);
  out.v = svd.V.col(0);
  if (want_full) out.full_spectrum = std::move(svd);
  return out;
}

double TransferEvaluator::norm_value(Complex lambda) const {
  svd_count_.fetch_add(1, std::memory_order_relaxed);
  ResolventFactorization::Point pt = fact_.at(lambda);
  if (pt.pole()) return kInf;
  if (path_ == EvalPath::SigmaMinShortcut) {
    Eigen::JacobiSVD<Matrix> svd(pt.matrix());
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    return (smin > 0.0 && std::isfinite(smin)) ? 1.0 / smin : kInf;
  }
  Matrix G = Cr_ * pt.solve(Br_) + sys_->D;
  if (!G.allFinite()) return kInf;
  Eigen::JacobiSVD<Matrix> svd(G);
  return svd.singularValues()(0);
}

DerivativeBundle TransferEvaluator::derivatives_at(Complex lambda, Complex dlambda,
                                                   Parameterization param,
                                                   bool want_second) const {
  svd_count_.fetch_add(1, std::memory_order_relaxed);
  DerivativeBundle out;
  out.parameterization = param;

  ResolventFactorization::Point pt = fact_.at(lambda);
  auto pole_out = [&]() {
    out.pole = true;
    out.value = kInf;
    return out;
  };
  if (pt.pole()) return pole_out();

  if (path_ == EvalPath::SigmaMinShortcut) {
    SvdResult svd = svd_full(pt.matrix());
    const Eigen::Index n = svd.sigma.size();
    const double smin = svd.sigma(n - 1);
    if (!(smin > 0.0) || !std::isfinite(smin)) return pole_out();
    out.value = 1.0 / smin;
    out.simple_gap = n > 1 ? 1.0 / smin - 1.0 / svd.sigma(n - 2) : out.value;
    out.degenerate = out.simple_gap <= simplicity_tol_ * std::max(out.value, 1.0);

    // sigma' = -Re(lambda' u_n^* T v_n) / sigma_min^2 with (u_n, v_n) the
    // smallest singular pair of W; T is E itself in LU mode.
    const Matrix& mid = fact_.middle();
    Vector Tv = mid * svd.V.col(n - 1);
    const Complex ip = svd.U.col(n - 1).dot(Tv);
    out.first = -(dlambda * ip).real() / (smin * smin);

    if (want_second && !out.degenerate) {
      Vector t1v = (svd.U.col(n - 1).adjoint() * mid * svd.V).transpose();
      Vector t2u = svd.U.adjoint() * Tv;
      RealVector sG = svd.sigma.reverse().cwiseInverse();
      Vector r(n), c(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index k = n - 1 - j;
        r(j) = -dlambda * t1v(k) / (smin * svd.sigma(k));
        c(j) = -dlambda * t2u(k) / (svd.sigma(k) * smin);
      }
      Complex acc(0, 0);
      for (Eigen::Index k = 0; k < n; ++k) acc += t1v(k) * t2u(k) / svd.sigma(k);
      const Complex a = 2.0 * dlambda * dlambda / (smin * smin) * acc;
      out.second = hermitian_second_from_parts(sG, r, c, a, n, n);
    }
    return out;
  }

  Matrix X1 = pt.solve(Br_);
  Matrix G = Cr_ * X1 + sys_->D;
  if (!G.allFinite()) return pole_out();
  SvdResult svd = svd_full(G);
  out.value = svd.sigma(0);
  out.simple_gap = gap_of(svd.sigma);
  out.degenerate = out.simple_gap <= simplicity_tol_ * std::max(out.value, 1.0);

  Matrix X2 = pt.solve(fact_.middle() * X1);
  Matrix dG = -dlambda * (Cr_ * X2);
  if (!dG.allFinite()) return pole_out();
  out.first = (svd.U.col(0).dot(dG * svd.V.col(0))).real();

  if (want_second && !out.degenerate) {
    Matrix X3 = pt.solve(fact_.middle() * X2);
    Matrix d2G = (2.0 * dlambda * dlambda) * (Cr_ * X3);
    out.second = second_derivative_hermitian(svd, dG, d2G, simplicity_tol_);
  }
  return out;
}

DerivativeBundle TransferEvaluator::derivatives_horizontal(double x, double y,
                                                           bool want_second) const {
  return derivatives_at(Complex(x, y), Complex(1.0, 0.0), Parameterization::Horizontal,
                        want_second);
}

DerivativeBundle TransferEvaluator::derivatives_radial(double r, double theta,
                                                       bool want_second) const {
  const Complex dir = std::polar(1.0, theta);
  return derivatives_at(r * dir, dir, Parameterization::Radial, want_second);
}

}  // namespace svset
