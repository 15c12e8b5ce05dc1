#include <cmath>

#include "doctest.h"
#include "learnpath/error.hpp"
#include "learnpath/landscape.hpp"
#include "test_support.hpp"

using namespace learnpath;

TEST_CASE("quadratic at its base point") {
  std::mt19937_64 rng(1);
  const Matrix h = testsupport::random_spd(rng, 3);
  const Vector base = testsupport::random_vector(rng, 3);
  QuadraticLoss loss(base, 2.5, Vector::Zero(3), h);
  const LossEval e = loss.eval(base);
  CHECK(e.value == 2.5);
  CHECK(e.gradient.norm() == 0.0);
  CHECK(e.hessian == h);
  const Vector other = testsupport::random_vector(rng, 3);
  CHECK(loss.eval(other).hessian == loss.eval(base + other).hessian);
  CHECK_THROWS_AS(loss.eval(Vector::Zero(2)), Error);
}

TEST_CASE("quadratic minimizer") {
  Matrix h(2, 2);
  h << 2.0, 0.0, 0.0, 4.0;
  Vector g(2);
  g << 2.0, -4.0;
  QuadraticLoss loss(Vector::Zero(2), 0.0, g, h);
  const Vector m = loss.minimizer();
  CHECK(m(0) == doctest::Approx(-1.0));
  CHECK(m(1) == doctest::Approx(1.0));
  CHECK(loss.eval(m).gradient.norm() < 1e-14);
}

TEST_CASE("double well 2d at the origin") {
  DoubleWell2D well(1.0, 1.0, 1.0, -0.5);
  const LossEval e = well.eval(Vector::Zero(2));
  CHECK(e.value == doctest::Approx(1.0));
  CHECK(e.gradient(0) == doctest::Approx(-0.5));
  CHECK(e.gradient(1) == doctest::Approx(0.0));
}

TEST_CASE("double well 2d minima") {
  DoubleWell2D well(1.0, 1.0, 1.0, -0.5);
  const auto minima = well.minima();
  REQUIRE(minima.size() == 2);
  // 4x³ − 4x − 0.5 = 0
  for (const auto& m : minima) CHECK(std::abs(4 * std::pow(m(0), 3) - 4 * m(0) - 0.5) < 1e-12);
  CHECK(minima[0](0) > 1.0);
  CHECK(minima[1](0) < -0.9);
  CHECK(well.value(minima[0]) < well.value(minima[1]));
}

TEST_CASE("double well 1d critical points") {
  DoubleWell1D sym(1.0, 0.0, 1.0);
  const auto cp = sym.critical_points();
  CHECK(cp.minus == doctest::Approx(-1.0));
  CHECK(cp.zero == 0.0);
  CHECK(cp.plus == doctest::Approx(1.0));

  DoubleWell1D small(1.0, 1e-6, 1.3);
  CHECK(small.critical_points().plus == doctest::Approx(1.3).epsilon(1e-5));
  CHECK(small.critical_points().minus == doctest::Approx(-1.3).epsilon(1e-5));

  DoubleWell1D tilted(1.0, 0.3, 1.0);
  const auto c = tilted.critical_points();
  CHECK(std::abs(tilted.derivative_at(c.plus)) < 1e-13);
  CHECK(std::abs(tilted.derivative_at(c.minus)) < 1e-13);
  CHECK(tilted.value_at(c.plus) == doctest::Approx(0.0));
  CHECK(tilted.value_at(c.minus) > 0.0);
  // bisection oracle on sign changes of L′
  auto bisect = [&](double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (tilted.derivative_at(lo) * tilted.derivative_at(mid) <= 0) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  std::vector<double> roots;
  const int n = 3000;
  for (int i = 0; i < n; ++i) {
    const double a = -3.0 + 6.0 * i / n + 1e-7, b = -3.0 + 6.0 * (i + 1) / n + 1e-7;
    if (tilted.derivative_at(a) * tilted.derivative_at(b) < 0) roots.push_back(bisect(a, b));
  }
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(c.minus).epsilon(1e-10));
  CHECK(std::abs(roots[1]) < 1e-10);
  CHECK(roots[2] == doctest::Approx(c.plus).epsilon(1e-10));
}

TEST_CASE("double well 1d offset makes the grid minimum zero") {
  DoubleWell1D well(2.0, 0.7, 1.1);
  const double plus = well.critical_points().plus;
  double lowest = 1e300;
  for (int i = 0; i <= 200000; ++i) lowest = std::min(lowest, well.value_at(-3.0 + 6.0 * i / 200000));
  CHECK(std::abs(lowest) <= 1e-9);
  CHECK(std::abs(well.eval(Vector::Constant(1, plus)).gradient(0)) < 1e-12);
}

TEST_CASE("finite difference check") {
  std::mt19937_64 rng(3);
  const Matrix h = testsupport::random_symmetric(rng, 4);
  QuadraticLoss quad(testsupport::random_vector(rng, 4), 0.3, testsupport::random_vector(rng, 4), h);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = finite_diff_check(quad, testsupport::random_vector(rng, 4, 3.0), 1e-5);
    CHECK(r.grad_error <= 1e-8);
    CHECK(r.hess_error <= 1e-8);
  }
  DoubleWell2D well(1.0, 1.0, 1.0, -0.5);
  Vector p(2);
  p << 0.3, -0.7;
  CHECK(finite_diff_check(well, p, 1e-5).grad_error <= 1e-6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = finite_diff_check(well, testsupport::random_vector(rng, 2), 1e-5);
    CHECK(r.grad_error <= 1e-6);
    CHECK(r.hess_error <= 1e-6);
  }
  DoubleWell1D w1(1.5, 0.4, 0.9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = finite_diff_check(w1, testsupport::random_vector(rng, 1), 1e-5);
    CHECK(r.grad_error <= 1e-6);
    CHECK(r.hess_error <= 1e-6);
  }
  QuadraticLoss zero(Vector::Zero(3), 0.0, Vector::Zero(3), Matrix::Zero(3, 3));
  const auto z = finite_diff_check(zero, testsupport::random_vector(rng, 3), 1e-5);
  CHECK(z.grad_error == 0.0);
  CHECK(z.hess_error == 0.0);
  CHECK_THROWS_AS(finite_diff_check(zero, Vector::Zero(3), 0.0), Error);
}

TEST_CASE("landscape constructors validate") {
  CHECK_THROWS_AS(DoubleWell2D(0.0, 1.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(DoubleWell1D(-1.0, 0.0, 1.0), Error);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(QuadraticLoss(Vector::Zero(2), 0.0, Vector::Zero(2), asym), Error);
}
