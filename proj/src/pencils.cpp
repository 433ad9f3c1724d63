#include "svset/pencils.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "svset/linalg.hpp"

namespace svset {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CouplingBlocks {
  Matrix Acal_shift;  // -B R^{-1} D^* C   (added to A - xE)
  Matrix upper;       // -gamma B R^{-1} B^*
  Matrix lower;       // gamma C^* S^{-1} C
};

// Shared blocks of both pencils. With D = 0 they collapse to
// upper = gamma^{-1} B B^*, lower = -gamma^{-1} C^* C, shift = 0.
CouplingBlocks coupling_blocks(const Matrix& B, const Matrix& C, const Matrix& D,
                               double gamma) {
  CouplingBlocks blk;
  const Eigen::Index n = B.rows();
  if (D.isZero(0.0)) {
    blk.Acal_shift = Matrix::Zero(n, n);
    blk.upper = (1.0 / gamma) * (B * B.adjoint());
    blk.lower = (-1.0 / gamma) * (C.adjoint() * C);
    return blk;
  }
  const Eigen::Index m = B.cols();
  const Eigen::Index p = C.rows();
  Matrix R = D.adjoint() * D - gamma * gamma * Matrix::Identity(m, m);
  Matrix S = D * D.adjoint() - gamma * gamma * Matrix::Identity(p, p);
  Eigen::PartialPivLU<Matrix> Rlu(R), Slu(S);
  blk.Acal_shift = -B * Rlu.solve(D.adjoint() * C);
  blk.upper = -gamma * (B * Rlu.solve(B.adjoint()));
  blk.lower = gamma * (C.adjoint() * Slu.solve(C));
  return blk;
}

// Merge ordinates closer than tol * scale to their mean; keeps the list
// strictly increasing so interval assembly never sees numerically split
// double eigenvalues.
std::vector<double> dedup_sorted(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  double scale = 1.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  std::vector<double> out;
  size_t i = 0;
  while (i < v.size()) {
    size_t j = i + 1;
    double sum = v[i];
    while (j < v.size() && v[j] - v[j - 1] <= tol * scale) sum += v[j++];
    out.push_back(sum / static_cast<double>(j - i));
    i = j;
  }
  return out;
}

BoundaryPointSet imaginary_ordinates(const SvsProblem& problem, const Matrix& M,
                                     const Matrix& N, SearchCounters* counters) {
  if (counters) counters->eig_solves += 1;
  GeneralizedEigs ge = generalized_eigs(M, N);
  const double tau = problem.options.tol.imag_eig;
  std::vector<double> ys;
  for (const GenEigenvalue& ev : ge.values) {
    if (ev.infinite) continue;
    const Complex& z = ev.value;
    if (std::abs(z.real()) <= tau * std::max(1.0, std::abs(z)))
      ys.push_back(z.imag());
  }
  BoundaryPointSet out;
  out.ordinates = dedup_sorted(std::move(ys), problem.options.tol.dedup);
  return out;
}

}  // namespace

Complex BoundaryPointSet::point_at(double ordinate) const {
  switch (geometry) {
    case Geometry::VerticalLine:
      return Complex(x, ordinate);
    case Geometry::Line: {
      const double theta_r = std::numbers::pi / 2.0 - theta;
      return std::polar(1.0, -theta_r) * Complex(-s, ordinate);
    }
    case Geometry::Circle:
      return radius * std::polar(1.0, ordinate);
  }
  return Complex(0, 0);
}

VerticalPencil build_vertical_pencil(const StateSpaceSystem& sys, double gamma,
                                     double x) {
  const Eigen::Index n = sys.n();
  CouplingBlocks blk = coupling_blocks(sys.B, sys.C, sys.D, gamma);
  Matrix Acal = sys.A - x * sys.E + blk.Acal_shift;
  VerticalPencil pc;
  pc.M.resize(2 * n, 2 * n);
  pc.M.topLeftCorner(n, n) = Acal;
  pc.M.topRightCorner(n, n) = blk.upper;
  pc.M.bottomLeftCorner(n, n) = blk.lower;
  pc.M.bottomRightCorner(n, n) = -Acal.adjoint();
  pc.N = Matrix::Zero(2 * n, 2 * n);
  pc.N.topLeftCorner(n, n) = sys.E;
  pc.N.bottomRightCorner(n, n) = sys.E.adjoint();
  return pc;
}

CirclePencil build_circle_pencil(const StateSpaceSystem& sys, double gamma, double r) {
  const Eigen::Index n = sys.n();
  CouplingBlocks blk = coupling_blocks(sys.B, sys.C, sys.D, gamma);
  CirclePencil pc;
  pc.S = Matrix::Zero(2 * n, 2 * n);
  pc.S.topLeftCorner(n, n) = sys.A + blk.Acal_shift;
  pc.S.topRightCorner(n, n) = blk.upper;
  pc.S.bottomRightCorner(n, n) = r * sys.E.adjoint();
  pc.T = Matrix::Zero(2 * n, 2 * n);
  pc.T.topLeftCorner(n, n) = r * sys.E;
  pc.T.bottomLeftCorner(n, n) = -blk.lower;
  if (sys.D.isZero(0.0)) {
    pc.T.bottomRightCorner(n, n) = sys.A.adjoint();
  } else {
    const Eigen::Index m = sys.m();
    Matrix R = sys.D.adjoint() * sys.D - gamma * gamma * Matrix::Identity(m, m);
    pc.T.bottomRightCorner(n, n) =
        sys.A.adjoint() - sys.C.adjoint() * sys.D * Eigen::PartialPivLU<Matrix>(R).solve(sys.B.adjoint());
  }
  return pc;
}

BoundaryPointSet vertical_boundary_points(const SvsProblem& problem, double x,
                                          SearchCounters* counters) {
  VerticalPencil pc = build_vertical_pencil(problem.system, problem.gamma(), x);
  BoundaryPointSet out = imaginary_ordinates(problem, pc.M, pc.N, counters);
  out.geometry = BoundaryPointSet::Geometry::VerticalLine;
  out.x = x;
  return out;
}

BoundaryPointSet line_boundary_points(const SvsProblem& problem, double theta,
                                      double s, SearchCounters* counters) {
  const double theta_r = std::numbers::pi / 2.0 - theta;
  const Complex rot = std::polar(1.0, theta_r);
  StateSpaceSystem rotated = problem.system;
  rotated.A = rot * problem.system.A;
  rotated.B = rot * problem.system.B;
  VerticalPencil pc = build_vertical_pencil(rotated, problem.gamma(), -s);
  BoundaryPointSet out = imaginary_ordinates(problem, pc.M, pc.N, counters);
  out.geometry = BoundaryPointSet::Geometry::Line;
  out.theta = theta;
  out.s = s;
  return out;
}

BoundaryPointSet circle_boundary_points(const SvsProblem& problem, double r,
                                        SearchCounters* counters) {
  if (counters) counters->eig_solves += 1;
  CirclePencil pc = build_circle_pencil(problem.system, problem.gamma(), r);
  GeneralizedEigs ge = generalized_eigs(pc.S, pc.T);
  const double tau = problem.options.tol.imag_eig;

  BoundaryPointSet out;
  out.geometry = BoundaryPointSet::Geometry::Circle;
  out.radius = r;
  std::vector<double> angles;
  for (const GenEigenvalue& ev : ge.values) {
    if (ev.indeterminate) out.suspected_singular = true;
    if (ev.infinite) continue;
    const double mod = std::abs(ev.value);
    if (std::abs(mod - 1.0) <= tau) {
      double th = std::arg(ev.value);
      if (th < 0.0) th += kTwoPi;
      if (th >= kTwoPi) th -= kTwoPi;
      angles.push_back(th);
    }
  }
  if (static_cast<Eigen::Index>(angles.size()) > 2 * problem.system.n())
    out.suspected_singular = true;
  out.ordinates = dedup_sorted(std::move(angles), problem.options.tol.dedup);
  return out;
}

}  // namespace svset
