#include <cmath>

#include "doctest.h"
#include "learnpath/error.hpp"
#include "learnpath/objective.hpp"
#include "test_support.hpp"

using namespace learnpath;

namespace {

Trajectory random_trajectory(std::mt19937_64& rng, int d, int n, double horizon) {
  Trajectory t = Trajectory::grid(horizon, n);
  for (int j = 0; j <= n; ++j) t.states.push_back(testsupport::random_vector(rng, d));
  return t;
}

double max_fd_gap(const Trajectory& traj, const Landscape& loss, const ObjectiveConfig& cfg,
                  const GeometrySpec* geo) {
  const auto grad = objective_gradient(traj, loss, cfg, geo);
  double gap = 0.0;
  const double step = 1e-5;
  for (int j = 1; j < traj.segments(); ++j) {
    for (int i = 0; i < traj.dim(); ++i) {
      Trajectory up = traj, down = traj;
      up.states[j](i) += step;
      down.states[j](i) -= step;
      const double fd =
          (eval_objective(up, loss, cfg, geo).value - eval_objective(down, loss, cfg, geo).value) / (2 * step);
      gap = std::max(gap, std::abs(fd - grad[j - 1](i)));
    }
  }
  return gap;
}

}  // namespace

TEST_CASE("single segment hand computation") {
  QuadraticLoss zero(Vector::Zero(1), 0.0, Vector::Zero(1), Matrix::Zero(1, 1));
  ObjectiveConfig cfg{1.0, 1.0, 0.0, 1.0, 1};
  const auto traj = Trajectory::straight_line(Vector::Zero(1), Vector::Ones(1), 1.0, 1);
  const auto v = eval_objective(traj, zero, cfg);
  CHECK(v.value == doctest::Approx(0.5));
  REQUIRE(v.profile.kinetic.size() == 1);
  CHECK(v.profile.kinetic[0] == doctest::Approx(0.5));
  CHECK(v.profile.potential.size() == 2);
}

TEST_CASE("constant trajectory at the global minimum costs nothing") {
  DoubleWell1D well(1.0, 0.3, 1.0);
  const Vector m = Vector::Constant(1, well.critical_points().plus);
  for (double gamma : {0.0, 0.5}) {
    ObjectiveConfig cfg{2.0, 3.0, gamma, 5.0, 50};
    const auto v = eval_objective(Trajectory::straight_line(m, m, 5.0, 50), well, cfg);
    CHECK(std::abs(v.value) < 1e-14);
    for (double ke : v.profile.kinetic) CHECK(ke == 0.0);
    for (double pe : v.profile.potential) CHECK(std::abs(pe) < 1e-14);
  }
}

TEST_CASE("hand-computed weighted sum with metric, drift and discount") {
  // two segments, 1D, L = θ², G = 2, f = −θ
  QuadraticLoss loss(Vector::Zero(1), 0.0, Vector::Zero(1), Matrix::Constant(1, 1, 2.0));
  GeometrySpec geo{Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, -1.0), Vector::Zero(1)};
  ObjectiveConfig cfg{0.5, 3.0, 0.2, 1.0, 2};
  Trajectory t = Trajectory::grid(1.0, 2);
  t.states = {Vector::Constant(1, 1.0), Vector::Constant(1, 0.5), Vector::Constant(1, 0.4)};
  const double h = 0.5;
  const double u0 = (0.5 - 1.0) / h + 1.0, u1 = (0.4 - 0.5) / h + 0.5;
  const double expected = (0.5 * 2 * u0 * u0 / 0.5 + 3.0 * 1.0) * h +
                          (0.5 * 2 * u1 * u1 / 0.5 + 3.0 * 0.25) * std::exp(-0.1) * h +
                          3.0 * 0.16 * std::exp(-0.2) * h;
  CHECK(eval_objective(t, loss, cfg, &geo).value == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("objective gradient matches finite differences") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 1 + trial % 3;
    QuadraticLoss quad(testsupport::random_vector(rng, d), 0.1, testsupport::random_vector(rng, d),
                       testsupport::random_symmetric(rng, d));
    ObjectiveConfig cfg{0.7, 1.3, 0.3, 2.0, 8};
    const auto traj = random_trajectory(rng, d, 8, 2.0);
    CHECK(max_fd_gap(traj, quad, cfg, nullptr) <= 1e-6);
    GeometrySpec geo{testsupport::random_spd(rng, d), testsupport::random_matrix(rng, d, d),
                     testsupport::random_vector(rng, d)};
    CHECK(max_fd_gap(traj, quad, cfg, &geo) <= 1e-6);
  }
  DoubleWell2D well(1.0, 1.0, 1.0, -0.5);
  ObjectiveConfig cfg{1.0, 1.0, 0.1, 3.0, 10};
  const auto traj = random_trajectory(rng, 2, 10, 3.0);
  CHECK(max_fd_gap(traj, well, cfg, nullptr) <= 1e-6);
  const auto decay = GeometrySpec::with_drift(-0.8 * Matrix::Identity(2, 2));
  CHECK(max_fd_gap(traj, well, cfg, &decay) <= 1e-6);
}

TEST_CASE("stationary constant trajectory has zero interior gradient") {
  QuadraticLoss quad(Vector::Zero(2), 0.0, Vector::Zero(2), Matrix::Identity(2, 2));
  ObjectiveConfig cfg{1.0, 1.0, 0.1, 1.0, 10};
  for (const auto& g : objective_gradient(Trajectory::straight_line(Vector::Zero(2), Vector::Zero(2), 1.0, 10),
                                          quad, cfg))
    CHECK(g.norm() == 0.0);
  Vector end(2);
  end << 1.0, 0.0;
  const auto moving = objective_gradient(Trajectory::straight_line(Vector::Zero(2), end, 1.0, 10), quad, cfg);
  double total = 0.0;
  for (const auto& g : moving) total += g.norm();
  CHECK(total > 0.0);
}

TEST_CASE("discount monotonicity") {
  std::mt19937_64 rng(9);
  QuadraticLoss quad(Vector::Zero(2), 0.0, Vector::Zero(2), testsupport::random_spd(rng, 2));
  const auto traj = random_trajectory(rng, 2, 20, 4.0);
  double prev = 1e300;
  for (double gamma : {0.0, 0.1, 0.5, 1.0, 3.0}) {
    ObjectiveConfig cfg{1.0, 1.0, gamma, 4.0, 20};
    const double j = eval_objective(traj, quad, cfg).value;
    CHECK(j <= prev);
    prev = j;
  }
}

TEST_CASE("refinement consistency is first order") {
  QuadraticLoss quad(Vector::Zero(1), 0.0, Vector::Zero(1), Matrix::Identity(1, 1));
  ObjectiveConfig cfg{1.0, 1.0, 0.2, 3.0, 1};
  auto sample = [&](int n) {
    Trajectory t = Trajectory::grid(3.0, n);
    for (int j = 0; j <= n; ++j) t.states.push_back(Vector::Constant(1, std::cos(t.times(j)) + 0.3 * t.times(j)));
    return eval_objective(t, quad, cfg).value;
  };
  const double d1 = std::abs(sample(50) - sample(100));
  const double d2 = std::abs(sample(100) - sample(200));
  CHECK(std::log2(d1 / d2) >= 0.9);
}

TEST_CASE("objective validates inputs") {
  QuadraticLoss quad(Vector::Zero(2), 0.0, Vector::Zero(2), Matrix::Identity(2, 2));
  ObjectiveConfig cfg;
  const auto traj = Trajectory::straight_line(Vector::Zero(3), Vector::Ones(3), 1.0, 4);
  CHECK_THROWS_AS(eval_objective(traj, quad, cfg), Error);
  const auto ok = Trajectory::straight_line(Vector::Zero(2), Vector::Ones(2), 1.0, 4);
  const auto geo = GeometrySpec::identity(3);
  CHECK_THROWS_AS(eval_objective(ok, quad, cfg, &geo), Error);
  ObjectiveConfig bad = cfg;
  bad.eta = 0.0;
  CHECK_THROWS_AS(eval_objective(ok, quad, bad), Error);
}
