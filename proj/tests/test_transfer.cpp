#include <doctest.h>

#include <random>

#include "svset/transfer.hpp"
#include "test_helpers.hpp"

using namespace svset;
using namespace svset::testing;

namespace {

StateSpaceSystem scalar_system(double a) {
  StateSpaceSystem s;
  s.A = Matrix::Constant(1, 1, Complex(a, 0));
  s.B = s.C = s.E = Matrix::Identity(1, 1);
  s.D = Matrix::Zero(1, 1);
  return s;
}

SolverOptions default_opts() { return SolverOptions{}; }

}  // namespace

TEST_CASE("norm_at scalar values and pole sentinel") {
  StateSpaceSystem s = scalar_system(0.0);
  SolverOptions opts = default_opts();
  TransferEvaluator ev(s, opts);
  CHECK(ev.path() == EvalPath::SigmaMinShortcut);

  SingularTriplet t = ev.norm_at(Complex(2, 0));
  CHECK(t.sigma == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(!t.pole);

  SingularTriplet p = ev.norm_at(Complex(0, 0));
  CHECK(p.pole);
  CHECK(std::isinf(p.sigma));

  StateSpaceSystem d2 = StateSpaceSystem::pseudospectral(Matrix::Zero(2, 2));
  d2.A(0, 0) = -1.0;
  d2.A(1, 1) = -2.0;
  TransferEvaluator ev2(d2, opts);
  CHECK(ev2.norm_at(Complex(0, 0)).sigma == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("singular triplet satisfies the defining equations") {
  std::mt19937_64 rng(99);
  SolverOptions opts = default_opts();
  for (int trial = 0; trial < 10; ++trial) {
    StateSpaceSystem s = random_system(5, 2, 3, 0.2, rng);
    TransferEvaluator ev(s, opts);
    const Complex lam(1.5 + 0.1 * trial, -0.3);
    SingularTriplet t = ev.norm_at(lam);
    REQUIRE(!t.pole);
    Matrix G = s.C * (lam * s.E - s.A).inverse() * s.B + s.D;
    CHECK(t.u.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const double scale = 1e-10 * std::max(t.sigma, 1.0);
    CHECK((G * t.v - t.sigma * t.u).norm() <= scale);
    CHECK((G.adjoint() * t.u - t.sigma * t.v).norm() <= scale);
  }
}

TEST_CASE("shortcut and full-transfer paths agree") {
  std::mt19937_64 rng(41);
  Matrix A = random_complex(6, 6, rng);
  StateSpaceSystem s = StateSpaceSystem::pseudospectral(A);
  s.E = random_invertible_e(6, rng, false);
  SolverOptions shortcut = default_opts();
  SolverOptions full = default_opts();
  full.eval_path = EvalPath::FullTransfer;
  TransferEvaluator evs(s, shortcut), evf(s, full);
  CHECK(evs.path() == EvalPath::SigmaMinShortcut);
  CHECK(evf.path() == EvalPath::FullTransfer);
  for (int t = 0; t < 12; ++t) {
    const Complex lam(2.2 * std::cos(t), 2.2 * std::sin(t));
    const double a = evs.norm_value(lam), b = evf.norm_value(lam);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
    const DerivativeBundle da = evs.derivatives_horizontal(lam.real(), lam.imag(), true);
    const DerivativeBundle db = evf.derivatives_horizontal(lam.real(), lam.imag(), true);
    CHECK(da.first == doctest::Approx(db.first).epsilon(1e-8));
    if (da.second && db.second)
      CHECK(*da.second == doctest::Approx(*db.second).epsilon(1e-6));
  }

  // Shortcut is not selectable when B, C, D are not the identity pattern.
  StateSpaceSystem bad = s;
  bad.D = Matrix::Constant(6, 6, Complex(0.1, 0));
  SolverOptions force = default_opts();
  force.eval_path = EvalPath::SigmaMinShortcut;
  CHECK_THROWS_AS(TransferEvaluator(bad, force), SvsError);
}

TEST_CASE("horizontal derivatives: scalar closed forms") {
  StateSpaceSystem s = scalar_system(0.0);
  SolverOptions opts = default_opts();
  TransferEvaluator ev(s, opts);

  // sigma(x) = 1/x on y = 0: value 0.5, slope -0.25, curvature 0.25 at x = 2.
  DerivativeBundle b = ev.derivatives_horizontal(2.0, 0.0, true);
  CHECK(b.value == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(b.first == doctest::Approx(-0.25).epsilon(1e-12));
  REQUIRE(b.second.has_value());
  CHECK(*b.second == doctest::Approx(0.25).epsilon(1e-11));

  // sigma(x) = 1/sqrt(x^2+1) is even in x at y = 1.
  DerivativeBundle c = ev.derivatives_horizontal(0.0, 1.0, true);
  CHECK(c.first == doctest::Approx(0.0).epsilon(1e-12));

  DerivativeBundle p = ev.derivatives_horizontal(0.0, 0.0, true);
  CHECK(p.pole);
}

TEST_CASE("radial derivatives: scalar closed forms and rotation consistency") {
  StateSpaceSystem s = scalar_system(0.0);
  SolverOptions opts = default_opts();
  TransferEvaluator ev(s, opts);
  for (double theta : {0.0, 0.7, 2.9}) {
    DerivativeBundle b = ev.derivatives_radial(2.0, theta, true);
    CHECK(b.value == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(b.first == doctest::Approx(-0.25).epsilon(1e-12));
  }

  std::mt19937_64 rng(7);
  StateSpaceSystem g = random_system(4, 2, 2, 0.3, rng);
  TransferEvaluator evg(g, opts);
  for (double r : {0.8, 1.7, 2.5}) {
    DerivativeBundle rad = evg.derivatives_radial(r, 0.0, true);
    DerivativeBundle hor = evg.derivatives_horizontal(r, 0.0, true);
    CHECK(rad.value == doctest::Approx(hor.value).epsilon(1e-12));
    CHECK(rad.first == doctest::Approx(hor.first).epsilon(1e-10));
    if (rad.second && hor.second)
      CHECK(*rad.second == doctest::Approx(*hor.second).epsilon(1e-8));
  }
}

TEST_CASE("derivatives match finite differences") {
  std::mt19937_64 rng(2024);
  SolverOptions opts = default_opts();
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const bool real = trial % 3 == 0;
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 4);
    StateSpaceSystem s = random_system(n, 1 + rng() % 2, 1 + rng() % 2, 0.2, rng, real);
    TransferEvaluator ev(s, opts);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    const double x = U(rng), y = U(rng);
    const bool radial = trial % 2 == 1;
    const double r = std::abs(x) + 1.0, theta = y;

    auto value = [&](double t) {
      return radial ? ev.derivatives_radial(t, theta, false).value
                    : ev.derivatives_horizontal(t, y, false).value;
    };
    DerivativeBundle b = radial ? ev.derivatives_radial(r, theta, true)
                                : ev.derivatives_horizontal(x, y, true);
    if (b.pole || b.degenerate || b.value > 1e3) continue;
    const double t0 = radial ? r : x;
    const double h1 = 1e-6 * std::max(1.0, std::abs(t0));
    const double fd1 = fd_first(value, t0, h1);
    CHECK(std::abs(b.first - fd1) / std::max(1.0, std::abs(b.first)) <= 1e-6);
    if (b.second) {
      const double h2 = 2e-4 * std::max(1.0, std::abs(t0));
      const double fd2 = fd_second(value, t0, h2);
      CHECK(std::abs(*b.second - fd2) / std::max(1.0, std::abs(*b.second)) <= 1e-4);
    }
    ++checked;
  }
  CHECK(checked >= 25);
}

TEST_CASE("second_derivative_hermitian kernel") {
  // 1x1 reduction: sigma'' = Re(u* d2G v) + Im(u* dG v)^2 / sigma.
  Matrix G(1, 1), dG(1, 1), d2G(1, 1);
  G << Complex(2.0, 0.0);
  dG << Complex(0.3, 0.7);
  d2G << Complex(-0.2, 0.4);
  SvdResult svd = svd_full(G);
  auto s2 = second_derivative_hermitian(svd, dG, d2G);
  REQUIRE(s2.has_value());
  CHECK(*s2 == doctest::Approx(-0.2 + 0.7 * 0.7 / 2.0).epsilon(1e-13));

  // Zero derivatives give zero.
  auto z = second_derivative_hermitian(svd, Matrix::Zero(1, 1), Matrix::Zero(1, 1));
  REQUIRE(z.has_value());
  CHECK(*z == doctest::Approx(0.0));

  // Rectangular case against a finite-difference oracle along the quadratic
  // path G(t) = G0 + t dG + t^2/2 d2G.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    Matrix G0 = random_complex(3, 2, rng);
    if (trial % 2) G0 = Matrix(G0.adjoint());  // exercise p < m too
    Matrix dG0 = random_complex(G0.rows(), G0.cols(), rng);
    Matrix d2G0 = random_complex(G0.rows(), G0.cols(), rng);
    SvdResult s0 = svd_full(G0);
    if (s0.sigma(0) - s0.sigma(1) < 1e-2) continue;
    auto got = second_derivative_hermitian(s0, dG0, d2G0);
    REQUIRE(got.has_value());
    auto path_value = [&](double t) {
      return spectral_norm(G0 + t * dG0 + 0.5 * t * t * d2G0);
    };
    const double fd2 = fd_second(path_value, 0.0, 1e-4);
    CHECK(std::abs(*got - fd2) / std::max(1.0, std::abs(*got)) <= 1e-4);
  }

  // Degenerate largest singular value: no second derivative.
  Matrix I2 = Matrix::Identity(2, 2);
  CHECK(!second_derivative_hermitian(svd_full(I2), I2, I2).has_value());
}

TEST_CASE("evaluation counter: one increment per call") {
  StateSpaceSystem s = scalar_system(-1.0);
  SolverOptions opts = default_opts();
  TransferEvaluator ev(s, opts);
  CHECK(ev.svd_count() == 0);
  (void)ev.norm_at(Complex(1, 1));
  CHECK(ev.svd_count() == 1);
  (void)ev.derivatives_horizontal(1.0, 0.0, true);
  CHECK(ev.svd_count() == 2);
  (void)ev.derivatives_radial(1.0, 0.3, false);
  CHECK(ev.svd_count() == 3);
  (void)ev.norm_value(Complex(2, 0));
  CHECK(ev.svd_count() == 4);
}

TEST_CASE("resolvent modes agree on the transfer norm") {
  std::mt19937_64 rng(77);
  StateSpaceSystem s = random_system(6, 2, 2, 0.2, rng);
  SolverOptions lu = default_opts(), he = default_opts();
  lu.resolvent = ResolventMode::LuPerPoint;
  he.resolvent = ResolventMode::HessenbergPrecomputed;
  TransferEvaluator evl(s, lu), evh(s, he);
  for (int t = 0; t < 10; ++t) {
    const Complex lam(1.8 * std::cos(2 * t), 1.8 * std::sin(3 * t + 1));
    CHECK(evl.norm_value(lam) == doctest::Approx(evh.norm_value(lam)).epsilon(1e-10));
  }
}
