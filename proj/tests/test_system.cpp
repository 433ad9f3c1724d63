#include <doctest.h>

#include <random>

#include "svset/system.hpp"
#include "test_helpers.hpp"

using namespace svset;
using namespace svset::testing;

namespace {

SvsProblem make_problem(StateSpaceSystem s, double eps) {
  SvsProblem pb;
  pb.system = std::move(s);
  pb.epsilon = eps;
  return pb;
}

}  // namespace

TEST_CASE("validate accepts and rejects") {
  Matrix A = Matrix::Identity(2, 2);
  StateSpaceSystem s = StateSpaceSystem::pseudospectral(A);

  CHECK_NOTHROW(validate(make_problem(s, 0.5)));  // D = 0, any eps > 0

  StateSpaceSystem sd = s;
  sd.D = Matrix::Zero(2, 2);
  sd.D(0, 0) = 2.0;  // ||D|| = 2, eps = 0.6 -> 1.2 >= 1
  try {
    validate(make_problem(sd, 0.6));
    CHECK(false);
  } catch (const SvsError& e) {
    CHECK(e.code() == ErrorClass::EpsilonTooLarge);
  }
  CHECK_NOTHROW(validate(make_problem(sd, 0.4)));

  StateSpaceSystem se = s;
  se.E = Matrix::Zero(2, 2);
  try {
    validate(make_problem(se, 0.5));
    CHECK(false);
  } catch (const SvsError& e) {
    CHECK(e.code() == ErrorClass::SingularE);
  }

  StateSpaceSystem sb = s;
  sb.B = Matrix::Identity(3, 2);  // wrong row count
  try {
    validate(make_problem(sb, 0.5));
    CHECK(false);
  } catch (const SvsError& e) {
    CHECK(e.code() == ErrorClass::DimensionMismatch);
  }
}

TEST_CASE("classify_spectrum canonical cases") {
  // A = diag(1,2), B = e1, C = e1^T: eigenvalue 1 is controllable+observable,
  // eigenvalue 2 neither (its eigenvectors are e2).
  StateSpaceSystem s;
  s.A = Matrix::Zero(2, 2);
  s.A(0, 0) = 1.0;
  s.A(1, 1) = 2.0;
  s.B = Matrix::Zero(2, 1);
  s.B(0, 0) = 1.0;
  s.C = Matrix::Zero(1, 2);
  s.C(0, 0) = 1.0;
  s.D = Matrix::Zero(1, 1);
  s.E = Matrix::Identity(2, 2);
  auto spec = classify_spectrum(s);
  REQUIRE(spec.size() == 2);
  for (const auto& ce : spec) {
    if (std::abs(ce.value - Complex(1, 0)) < 1e-10) {
      CHECK(ce.controllable);
      CHECK(ce.observable);
    } else {
      CHECK(std::abs(ce.value - Complex(2, 0)) < 1e-10);
      CHECK(!ce.controllable);
      CHECK(!ce.observable);
    }
  }

  // Full-rank B, C: everything controllable and observable.
  std::mt19937_64 rng(3);
  StateSpaceSystem full = StateSpaceSystem::pseudospectral(random_complex(4, 4, rng));
  for (const auto& ce : classify_spectrum(full)) {
    CHECK(ce.controllable);
    CHECK(ce.observable);
  }

  // A = 0 (1x1), B = 0, C = 1: observable, not controllable.
  StateSpaceSystem z;
  z.A = Matrix::Zero(1, 1);
  z.B = Matrix::Zero(1, 1);
  z.C = Matrix::Identity(1, 1);
  z.D = Matrix::Zero(1, 1);
  z.E = Matrix::Identity(1, 1);
  auto zc = classify_spectrum(z);
  REQUIRE(zc.size() == 1);
  CHECK(zc[0].observable);
  CHECK(!zc[0].controllable);
}

TEST_CASE("classified spectrum of a real system is conjugation-closed") {
  std::mt19937_64 rng(17);
  StateSpaceSystem s = StateSpaceSystem::pseudospectral(random_real(6, 6, rng));
  auto spec = classify_spectrum(s);
  for (const auto& ce : spec) {
    bool found = false;
    for (const auto& other : spec)
      if (std::abs(other.value - std::conj(ce.value)) < 1e-8) {
        found = true;
        CHECK(other.controllable == ce.controllable);
        CHECK(other.observable == ce.observable);
      }
    CHECK(found);
  }
}

TEST_CASE("initial_point selection") {
  std::vector<ClassifiedEigenvalue> spec(2);
  spec[0].value = Complex(-1, 0);
  spec[1].value = Complex(-2, 1);
  spec[0].observable = spec[0].controllable = true;
  spec[1].observable = spec[1].controllable = true;
  auto p = initial_point(spec, Inclusion::All, Mode::Abscissa);
  REQUIRE(p.has_value());
  CHECK(*p == Complex(-1, 0));

  spec[0].value = Complex(0, 0.5);
  spec[1].value = Complex(-0.3, 0);
  p = initial_point(spec, Inclusion::All, Mode::Radius);
  REQUIRE(p.has_value());
  CHECK(*p == Complex(0, 0.5));

  ClassifiedEigenvalue inf_ev;
  inf_ev.infinite = true;
  spec.push_back(inf_ev);
  CHECK(!initial_point(spec, Inclusion::All, Mode::Radius).has_value());

  // Inclusion filter can reject the outermost eigenvalue.
  spec.pop_back();
  spec[0].controllable = false;
  p = initial_point(spec, Inclusion::ControllableAndObservable, Mode::Radius);
  REQUIRE(p.has_value());
  CHECK(*p == Complex(-0.3, 0));

  spec[1].observable = false;
  CHECK_THROWS_AS(
      (void)initial_point(spec, Inclusion::ControllableAndObservable, Mode::Radius),
      SvsError);
}

TEST_CASE("infinite eigenvalue of a regular pencil is flagged") {
  StateSpaceSystem s;
  s.A = Matrix::Zero(2, 2);
  s.A(0, 0) = 1.0;
  s.A(1, 1) = 2.0;
  s.E = Matrix::Zero(2, 2);
  s.E(0, 0) = 1.0;  // regular pencil, eigenvalues {1, inf}
  s.B = Matrix::Identity(2, 2);
  s.C = Matrix::Identity(2, 2);
  s.D = Matrix::Zero(2, 2);
  auto spec = classify_spectrum(s);
  int inf_count = 0;
  for (const auto& ce : spec) inf_count += ce.infinite ? 1 : 0;
  CHECK(inf_count == 1);
  CHECK(!initial_point(spec, Inclusion::All, Mode::Abscissa).has_value());
}

TEST_CASE("is_real_valued is exact") {
  StateSpaceSystem s = StateSpaceSystem::pseudospectral(Matrix::Identity(2, 2));
  CHECK(s.is_real_valued());
  s.A(0, 1) = Complex(0.0, 1e-300);
  CHECK(!s.is_real_valued());
}
