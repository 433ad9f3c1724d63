#include "svset/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Jacobi>

namespace svset {

namespace {

extern "C" {
void zggev_(const char* jobvl, const char* jobvr, const int* n, Complex* a,
            const int* lda, Complex* b, const int* ldb, Complex* alpha,
            Complex* beta, Complex* vl, const int* ldvl, Complex* vr,
            const int* ldvr, Complex* work, const int* lwork, double* rwork,
            int* info);
void zgeqrf_(const int* m, const int* n, Complex* a, const int* lda,
             Complex* tau, Complex* work, const int* lwork, int* info);
void zungqr_(const int* m, const int* n, const int* k, Complex* a,
             const int* lda, const Complex* tau, Complex* work,
             const int* lwork, int* info);
void zgghrd_(const char* compq, const char* compz, const int* n,
             const int* ilo, const int* ihi, Complex* a, const int* lda,
             Complex* b, const int* ldb, Complex* q, const int* ldq,
             Complex* z, const int* ldz, int* info);
}

bool all_finite(const Matrix& M) { return M.allFinite(); }

}  // namespace

const char* error_slug(ErrorClass c) {
  switch (c) {
    case ErrorClass::DimensionMismatch: return "dimension-mismatch";
    case ErrorClass::EpsilonTooLarge: return "epsilon-too-large";
    case ErrorClass::SingularE: return "e-singular";
    case ErrorClass::EmptyAfterFilter: return "empty-after-filter";
    case ErrorClass::NumericalFailure: return "numerical-failure";
    case ErrorClass::PoleProximity: return "pole-proximity";
    case ErrorClass::ParseError: return "parse-error";
    case ErrorClass::IoError: return "io-error";
    case ErrorClass::BadArguments: return "bad-arguments";
  }
  return "unknown";
}

SvdResult svd_full(const Matrix& M) {
  if (!all_finite(M))
    throw SvsError(ErrorClass::NumericalFailure, "svd_full: non-finite input");
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success)
    throw SvsError(ErrorClass::NumericalFailure, "svd_full: backend did not converge");
  return SvdResult{svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

SmallestSingular smallest_singular_value(const Matrix& M) {
  if (M.rows() != M.cols())
    throw SvsError(ErrorClass::DimensionMismatch, "smallest_singular_value: square input required");
  SvdResult s = svd_full(M);
  const Eigen::Index k = s.sigma.size() - 1;
  return SmallestSingular{s.sigma(k), s.U.col(k), s.V.col(k)};
}

GeneralizedEigs generalized_eigs(const Matrix& M, const Matrix& N, bool want_vectors) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n || N.rows() != n || N.cols() != n)
    throw SvsError(ErrorClass::DimensionMismatch, "generalized_eigs: square pencil required");
  if (!all_finite(M) || !all_finite(N))
    throw SvsError(ErrorClass::NumericalFailure, "generalized_eigs: non-finite pencil");

  Matrix a = M, b = N;
  Vector alpha(n), beta(n);
  Matrix vl(want_vectors ? n : 1, want_vectors ? n : 1);
  Matrix vr(want_vectors ? n : 1, want_vectors ? n : 1);
  const int ldv = static_cast<int>(vl.rows());
  std::vector<double> rwork(std::max(1, 8 * n));
  int info = 0;
  const char* jobv = want_vectors ? "V" : "N";

  Complex wkopt;
  int lwork = -1;
  zggev_(jobv, jobv, &n, a.data(), &n, b.data(), &n, alpha.data(), beta.data(),
         vl.data(), &ldv, vr.data(), &ldv, &wkopt, &lwork, rwork.data(), &info);
  lwork = std::max(2 * n, static_cast<int>(wkopt.real()));
  std::vector<Complex> work(lwork);
  zggev_(jobv, jobv, &n, a.data(), &n, b.data(), &n, alpha.data(), beta.data(),
         vl.data(), &ldv, vr.data(), &ldv, work.data(), &lwork, rwork.data(), &info);
  if (info != 0)
    throw SvsError(ErrorClass::NumericalFailure,
                   "generalized_eigs: zggev failed (info=" + std::to_string(info) + ")");

  GeneralizedEigs out;
  out.values.resize(n);
  for (int i = 0; i < n; ++i) {
    GenEigenvalue& ev = out.values[i];
    if (beta(i) == Complex(0.0, 0.0)) {
      ev.infinite = true;
      ev.indeterminate = (alpha(i) == Complex(0.0, 0.0));
    } else {
      ev.value = alpha(i) / beta(i);
      if (!std::isfinite(ev.value.real()) || !std::isfinite(ev.value.imag()))
        ev.infinite = true;
    }
  }
  if (want_vectors) {
    out.left = std::move(vl);
    out.right = std::move(vr);
  }
  return out;
}

HessTriangular hessenberg_triangular(const Matrix& A, const Matrix& E) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || E.rows() != n || E.cols() != n)
    throw SvsError(ErrorClass::DimensionMismatch, "hessenberg_triangular: square inputs required");

  // E = Q1 R, then reduce (Q1^* A, R) keeping track of the accumulated Q.
  Matrix R = E;
  Vector tau(std::max(1, n));
  int info = 0, lwork = -1;
  Complex wkopt;
  zgeqrf_(&n, &n, R.data(), &n, tau.data(), &wkopt, &lwork, &info);
  lwork = std::max(n, static_cast<int>(wkopt.real()));
  std::vector<Complex> work(lwork);
  zgeqrf_(&n, &n, R.data(), &n, tau.data(), work.data(), &lwork, &info);
  if (info != 0)
    throw SvsError(ErrorClass::NumericalFailure, "hessenberg_triangular: zgeqrf failed");

  Matrix Q = R;
  lwork = -1;
  zungqr_(&n, &n, &n, Q.data(), &n, tau.data(), &wkopt, &lwork, &info);
  lwork = std::max(n, static_cast<int>(wkopt.real()));
  work.resize(lwork);
  zungqr_(&n, &n, &n, Q.data(), &n, tau.data(), work.data(), &lwork, &info);
  if (info != 0)
    throw SvsError(ErrorClass::NumericalFailure, "hessenberg_triangular: zungqr failed");
  R.triangularView<Eigen::StrictlyLower>().setZero();

  Matrix H = Q.adjoint() * A;
  Matrix Z = Matrix::Identity(n, n);
  const int ilo = 1, ihi = n;
  zgghrd_("V", "I", &n, &ilo, &ihi, H.data(), &n, R.data(), &n, Q.data(), &n,
          Z.data(), &n, &info);
  if (info != 0)
    throw SvsError(ErrorClass::NumericalFailure, "hessenberg_triangular: zgghrd failed");

  return HessTriangular{std::move(H), std::move(R), std::move(Q), std::move(Z)};
}

ResolventFactorization ResolventFactorization::build(const Matrix& A, const Matrix& E,
                                                     Mode mode) {
  ResolventFactorization f;
  f.mode_ = mode;
  f.n_ = A.rows();
  if (mode == Mode::LuPerPoint) {
    f.A_ = A;
    f.E_ = E;
  } else {
    f.red_ = hessenberg_triangular(A, E);
  }
  return f;
}

const Matrix& ResolventFactorization::middle() const {
  return mode_ == Mode::LuPerPoint ? E_ : red_.T;
}

Matrix ResolventFactorization::reduce_input(const Matrix& B) const {
  return mode_ == Mode::LuPerPoint ? B : Matrix(red_.Q.adjoint() * B);
}

Matrix ResolventFactorization::reduce_output(const Matrix& C) const {
  return mode_ == Mode::LuPerPoint ? C : Matrix(C * red_.Z);
}

Matrix ResolventFactorization::left_to_original(const Matrix& u) const {
  return mode_ == Mode::LuPerPoint ? u : Matrix(red_.Z * u);
}

Matrix ResolventFactorization::right_to_original(const Matrix& v) const {
  return mode_ == Mode::LuPerPoint ? v : Matrix(red_.Q * v);
}

ResolventFactorization::Point ResolventFactorization::at(Complex lambda) const {
  Point p;
  if (mode_ == Mode::LuPerPoint) {
    p.W_ = lambda * E_ - A_;
    auto lu = std::make_shared<Eigen::PartialPivLU<Matrix>>(p.W_);
    p.pole_ = (lu->matrixLU().diagonal().array() == Complex(0, 0)).any();
    p.lu_ = lu;
  } else {
    p.hess_ = true;
    p.W_ = lambda * red_.T - red_.H;
    // Givens QR of the upper Hessenberg W; rotations saved for solves.
    p.R_ = p.W_;
    const Eigen::Index n = n_;
    p.givens_.reserve(n > 0 ? n - 1 : 0);
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
      Eigen::JacobiRotation<Complex> G;
      G.makeGivens(p.R_(j, j), p.R_(j + 1, j));
      p.R_.applyOnTheLeft(j, j + 1, G.adjoint());
      p.R_(j + 1, j) = Complex(0, 0);
      p.givens_.emplace_back(G.c().real(), G.s());
    }
    p.pole_ = (p.R_.diagonal().array() == Complex(0, 0)).any();
  }
  return p;
}

Matrix ResolventFactorization::Point::solve(const Matrix& rhs) const {
  if (!hess_) {
    return std::static_pointer_cast<Eigen::PartialPivLU<Matrix>>(lu_)->solve(rhs);
  }
  Matrix y = rhs;
  const Eigen::Index n = R_.rows();
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    Eigen::JacobiRotation<Complex> G(givens_[j].first, givens_[j].second);
    y.applyOnTheLeft(j, j + 1, G.adjoint());
  }
  R_.triangularView<Eigen::Upper>().solveInPlace(y);
  return y;
}

Matrix resolvent_apply(const ResolventFactorization& fact, Complex lambda,
                       const Matrix& X) {
  ResolventFactorization::Point p = fact.at(lambda);
  if (p.pole())
    throw SvsError(ErrorClass::PoleProximity,
                   "resolvent_apply: lambda is (numerically) a pole of the resolvent");
  // (lambda E - A)^{-1} X = Z W^{-1} Q^* X in Hessenberg mode.
  Matrix y = fact.left_to_original(p.solve(fact.reduce_input(X)));
  if (!y.allFinite())
    throw SvsError(ErrorClass::PoleProximity,
                   "resolvent_apply: solve produced non-finite values (pole proximity)");
  return y;
}

}  // namespace svset
