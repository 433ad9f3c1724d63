#pragma once

#include <vector>

#include "svset/system.hpp"

namespace svset {

/// Counters shared across a solve; mirrors the table columns of the report
/// (pencil eigensolves vs transfer-norm evaluations vs searches).
struct SearchCounters {
  long eig_solves = 0;
  long level_searches = 0;   // vertical or circular
  long line_searches = 0;    // direct-extended horizontal/radial eig solves
  long root_searches_solved = 0;
  long root_searches_requested = 0;
};

/// Boundary points of the eps-spectral value set on one search geometry.
/// Ordinates are strictly increasing after dedup: y values on a vertical line,
/// signed offsets along a line, or angles in [0, 2pi) on a circle.
struct BoundaryPointSet {
  enum class Geometry { VerticalLine, Line, Circle };
  Geometry geometry = Geometry::VerticalLine;
  double x = 0.0;                  // vertical line position
  double theta = 0.0, s = 0.0;     // line L(theta, s)
  double radius = 0.0;             // circle radius
  std::vector<double> ordinates;
  bool suspected_singular = false;

  /// Complex-plane point of an ordinate on this geometry.
  Complex point_at(double ordinate) const;
};

/// All boundary ordinates on the vertical line Re(lambda) = x, from the
/// purely imaginary eigenvalues of the 2n x 2n Hamiltonian-type pencil.
BoundaryPointSet vertical_boundary_points(const SvsProblem& problem, double x,
                                          SearchCounters* counters = nullptr);

/// Boundary ordinates on the line L(theta, s) via the rotated vertical pencil;
/// points are e^{-i theta_r} (-s + i omega) with theta_r = pi/2 - theta.
BoundaryPointSet line_boundary_points(const SvsProblem& problem, double theta,
                                      double s, SearchCounters* counters = nullptr);

/// Boundary angles on the circle |lambda| = r, from the unimodular eigenvalues
/// of the symplectic-type pencil; angles sorted in [0, 2pi). Sets the
/// suspected_singular flag when the unimodular count exceeds 2n or the backend
/// reports indeterminate eigenvalues.
BoundaryPointSet circle_boundary_points(const SvsProblem& problem, double r,
                                        SearchCounters* counters = nullptr);

/// Pencil blocks, exposed for tests: (M_{gamma x}, N) with
/// M = [[A - xE - B R^{-1} D^* C, -gamma B R^{-1} B^*],
///      [gamma C^* S^{-1} C, -(A - xE - B R^{-1} D^* C)^*]],
/// N = diag(E, E^*), R = D^*D - gamma^2 I, S = DD^* - gamma^2 I.
struct VerticalPencil {
  Matrix M;
  Matrix N;
};
VerticalPencil build_vertical_pencil(const StateSpaceSystem& sys, double gamma, double x);

/// (S_{gamma r}, T_{gamma r}) of the circular search.
struct CirclePencil {
  Matrix S;
  Matrix T;
};
CirclePencil build_circle_pencil(const StateSpaceSystem& sys, double gamma, double r);

}  // namespace svset
