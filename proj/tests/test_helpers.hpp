#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "svset/system.hpp"
#include "svset/linalg.hpp"

namespace svset::testing {

inline Matrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = Complex(g(rng), g(rng));
  return M;
}

inline Matrix random_real(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = Complex(g(rng), 0.0);
  return M;
}

inline Matrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  Matrix G = random_complex(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
  return Q;
}

/// Normal matrix with the given eigenvalues.
inline Matrix random_normal_matrix(const Vector& eigs, std::mt19937_64& rng) {
  Matrix Q = random_unitary(eigs.size(), rng);
  return Q * eigs.asDiagonal() * Q.adjoint();
}

/// Well-conditioned random invertible E = I + 0.3 R / ||R||.
inline Matrix random_invertible_e(Eigen::Index n, std::mt19937_64& rng, bool real) {
  Matrix R = real ? random_real(n, n, rng) : random_complex(n, n, rng);
  return Matrix::Identity(n, n) + 0.3 / spectral_norm(R) * R;
}

/// Random general system; D rescaled so eps ||D|| <= 0.5. Matrices scaled to
/// keep the spectral value set within a few units of the origin.
inline StateSpaceSystem random_system(Eigen::Index n, Eigen::Index m, Eigen::Index p,
                                      double eps, std::mt19937_64& rng,
                                      bool real = false) {
  auto rnd = [&](Eigen::Index r, Eigen::Index c) {
    return real ? random_real(r, c, rng) : random_complex(r, c, rng);
  };
  StateSpaceSystem s;
  s.A = rnd(n, n);
  s.A *= 1.0 / spectral_norm(s.A);
  s.B = rnd(n, m);
  s.B *= 1.0 / spectral_norm(s.B);
  s.C = rnd(p, n);
  s.C *= 1.0 / spectral_norm(s.C);
  s.D = rnd(p, m);
  const double dn = spectral_norm(s.D);
  if (eps * dn > 0.5) s.D *= 0.5 / (eps * dn);
  s.E = random_invertible_e(n, rng, real);
  return s;
}

/// Central finite differences for derivative oracles.
template <typename F>
double fd_first(F&& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

template <typename F>
double fd_second(F&& f, double t, double h) {
  return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
}

}  // namespace svset::testing
