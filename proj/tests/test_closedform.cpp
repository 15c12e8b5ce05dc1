#include <cmath>
#include <numbers>

#include "doctest.h"
#include "learnpath/closedform.hpp"
#include "learnpath/error.hpp"
#include "learnpath/matfun.hpp"
#include "learnpath/variational.hpp"
#include "test_support.hpp"

using namespace learnpath;

namespace {

QuadraticLoss random_quadratic(std::mt19937_64& rng, int n) {
  return QuadraticLoss(testsupport::random_vector(rng, n), 0.0, testsupport::random_vector(rng, n),
                       testsupport::random_spd(rng, n));
}

// Residual order under grid halving.
double residual_order(const std::function<Vector(double)>& path, const Landscape& loss, const ObjectiveConfig& cfg,
                      const GeometrySpec* geo, double horizon) {
  const double r1 = el_residual(sample_trajectory(path, horizon, 100), loss, cfg, geo).max_norm;
  const double r2 = el_residual(sample_trajectory(path, horizon, 200), loss, cfg, geo).max_norm;
  return std::log2(r1 / r2);
}

}  // namespace

TEST_CASE("momentum solution endpoints") {
  std::mt19937_64 rng(1);
  const auto loss = random_quadratic(rng, 3);
  ObjectiveConfig cfg{1.0, 1.0, 0.5, 10.0, 100};
  CHECK((momentum_solution(loss, cfg, 0.0) - loss.base_point()).norm() < 1e-14);
  CHECK((momentum_solution(loss, cfg, 200.0) - loss.minimizer()).norm() < 1e-10);
}

TEST_CASE("scalar momentum update") {
  QuadraticLoss loss(Vector::Zero(1), 0.0, Vector::Ones(1), Matrix::Identity(1, 1));
  ObjectiveConfig cfg{1.0, 1.0, 0.0, 1.0, 10};
  CHECK(momentum_solution(loss, cfg, std::log(2.0))(0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK_THROWS_AS(momentum_solution(QuadraticLoss(Vector::Zero(1), 0.0, Vector::Ones(1), Matrix::Zero(1, 1)), cfg, 1.0),
                  Error);
}

TEST_CASE("limit rules") {
  Matrix h(2, 2);
  h << 1.0, 0.0, 0.0, 4.0;
  Vector g(2);
  g << 1.0, 0.0;
  QuadraticLoss loss(Vector::Zero(2), 0.0, g, h);
  ObjectiveConfig cfg{1.0, 1.0, 2.0, 1.0, 10};
  const Vector gd = limit_rule(RuleRegime::kGradientDescent, loss, cfg, 0.1);
  CHECK(gd(0) == doctest::Approx(-0.05));
  CHECK(gd(1) == doctest::Approx(0.0));

  cfg.gamma = 0.0;
  CHECK_THROWS_AS(limit_rule(RuleRegime::kGradientDescent, loss, cfg, 0.1), Error);
  const Matrix id = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(limit_rule(RuleRegime::kNaturalBallistic, loss, cfg, 0.1), Error);

  std::mt19937_64 rng(2);
  const auto rq = random_quadratic(rng, 4);
  const Matrix id4 = Matrix::Identity(4, 4);
  CHECK((limit_rule(RuleRegime::kNaturalBallistic, rq, cfg, 0.1, &id4) - limit_rule(RuleRegime::kBallistic, rq, cfg, 0.1))
            .norm() < 1e-12);

  // per-direction rates: g ∝ H e makes each update component proportional to its rate
  Vector gg(2);
  gg << 1.0, 4.0;
  QuadraticLoss aligned(Vector::Zero(2), 0.0, gg, h);
  const Vector bal = limit_rule(RuleRegime::kBallistic, aligned, cfg, 0.01);
  CHECK(bal(1) / bal(0) == doctest::Approx(2.0));
  cfg.gamma = 100.0;
  const Vector slow = limit_rule(RuleRegime::kGradientDescent, aligned, cfg, 0.01);
  CHECK(slow(1) / slow(0) == doctest::Approx(4.0));
}

TEST_CASE("limit rule consistency with the momentum expansion") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto loss = random_quadratic(rng, 3);
    ObjectiveConfig cfg{1.0, 1.0, 0.0, 1.0, 10};
    for (double dt : {1e-3, 5e-4}) {
      const Vector full = momentum_solution(loss, cfg, dt) - loss.base_point();
      const Vector bal = limit_rule(RuleRegime::kBallistic, loss, cfg, dt);
      CHECK((full - bal).norm() <= 4.0 * dt * dt * (1.0 + loss.gradient().norm()));
    }
    // overdamped: γ/√(ηkλmax) ≥ 100
    const double lmax = matfun::sym_eig(loss.hessian()).eigenvalues.maxCoeff();
    cfg.gamma = 100.0 * std::sqrt(lmax) * 1.5;
    const double dt = 1e-3;
    const Vector full = momentum_solution(loss, cfg, dt) - loss.base_point();
    const Vector gd = limit_rule(RuleRegime::kGradientDescent, loss, cfg, dt);
    CHECK((full - gd).norm() <= 0.02 * gd.norm());
  }
}

TEST_CASE("natural momentum solution") {
  std::mt19937_64 rng(4);
  const auto loss = random_quadratic(rng, 3);
  ObjectiveConfig cfg{1.3, 0.7, 0.4, 1.0, 10};
  const Matrix id = Matrix::Identity(3, 3);
  for (double t : {0.0, 0.3, 2.0}) {
    CHECK((natural_momentum_solution(loss, cfg, id, t) - momentum_solution(loss, cfg, t)).norm() < 1e-12);
    ObjectiveConfig scaled = cfg;
    scaled.eta = cfg.eta / 2.5;
    CHECK((natural_momentum_solution(loss, cfg, 2.5 * id, t) - momentum_solution(loss, scaled, t)).norm() <= 1e-10);
  }
  const Matrix g = testsupport::random_spd(rng, 3);
  CHECK((natural_momentum_solution(loss, cfg, g, 400.0) - loss.minimizer()).norm() < 1e-8);
  // natural Newton step equals the metric-free one as dt grows
  const Vector step = limit_rule(RuleRegime::kNewton, loss, cfg, 400.0, &g);
  CHECK((step - (loss.minimizer() - loss.base_point())).norm() < 1e-8);
}

TEST_CASE("rotation drift solution") {
  Matrix j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  Vector g(2), th0(2);
  g << 0.4, -0.2;
  th0 << 1.0, 0.5;
  ObjectiveConfig cfg{1.0, 1.0, 0.0, 1.0, 10};
  const auto s = rotation_drift_spectral(j, 1.0, g, th0, cfg);
  CHECK((s.bias - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK((s.target - 0.5 * (th0 - g)).norm() < 1e-14);
  CHECK((rotation_drift_solution(j, 1.0, g, th0, cfg, 60.0) - 0.5 * (th0 - g)).norm() < 1e-12);
  CHECK((s.at(0.0) - th0).norm() < 1e-15);

  // J = 0 collapses onto the momentum solution with H = hI
  cfg.gamma = 0.3;
  QuadraticLoss iso(th0, 0.0, g, 2.0 * Matrix::Identity(2, 2));
  for (double t : {0.2, 1.0, 5.0}) {
    CHECK((rotation_drift_solution(Matrix::Zero(2, 2), 2.0, g, th0, cfg, t) - momentum_solution(iso, cfg, t)).norm() <
          1e-12);
  }
  Matrix bad = j;
  bad(0, 0) = 0.1;
  CHECK_THROWS_AS(rotation_drift_solution(bad, 1.0, g, th0, cfg, 1.0), Error);
}

TEST_CASE("rotation drift spirals around its limit") {
  Matrix j(2, 2);
  j << 0.0, -0.8, 0.8, 0.0;
  Vector g(2), th0(2);
  g << 0.3, 0.1;
  th0 << 2.0, -1.0;
  ObjectiveConfig cfg{1.0, 1.0, 0.1, 1.0, 10};
  const auto s = rotation_drift_spectral(j, 1.0, g, th0, cfg);
  double prev_angle = 0.0, unwrapped = 0.0;
  double prev_radius = 1e300;
  for (int i = 0; i <= 400; ++i) {
    const Vector d = s.at(0.05 * i) - s.target;
    const double angle = std::atan2(d(1), d(0));
    if (i > 0) {
      double step = angle - prev_angle;
      while (step > std::numbers::pi) step -= 2 * std::numbers::pi;
      while (step < -std::numbers::pi) step += 2 * std::numbers::pi;
      CHECK(step > 0.0);
      unwrapped += step;
      CHECK(d.norm() <= prev_radius);
    }
    prev_angle = angle;
    prev_radius = d.norm();
  }
  CHECK(unwrapped > 2 * std::numbers::pi);
}

TEST_CASE("weight decay drift solution") {
  std::mt19937_64 rng(5);
  const auto loss = random_quadratic(rng, 3);
  ObjectiveConfig cfg{1.0, 1.0, 0.3, 1.0, 10};
  for (double t : {0.0, 0.5, 3.0}) {
    CHECK((weight_decay_drift_solution(0.0, loss, cfg, t) - momentum_solution(loss, cfg, t)).norm() < 1e-12);
    CHECK((weight_decay_drift_solution(cfg.gamma, loss, cfg, t) - momentum_solution(loss, cfg, t)).norm() < 1e-12);
  }
  const double jj = 0.9;
  const auto s = weight_decay_spectral(jj, loss, cfg);
  const matfun::SymEig e = matfun::sym_eig(loss.hessian());
  for (int i = 0; i < 3; ++i) {
    const double lam = e.eigenvalues(i);
    const double b = lam / (lam + (jj - cfg.gamma) * jj);
    CHECK(b < 1.0);
    const Vector q = e.eigenvectors.col(i);
    CHECK(q.dot(s.bias * q) == doctest::Approx(b).epsilon(1e-12));
  }
  CHECK((weight_decay_drift_solution(jj, loss, cfg, 300.0) - s.bias * loss.minimizer()).norm() < 1e-8);
  CHECK(s.target.norm() < loss.minimizer().norm());
}

TEST_CASE("weight decay rejects a vanishing bias denominator") {
  // ηkλ + (j−γ)j = 0 at λ = 0.25, j = 0.5, γ = 1
  QuadraticLoss loss(Vector::Zero(1), 0.0, Vector::Ones(1), Matrix::Constant(1, 1, 0.25));
  ObjectiveConfig cfg{1.0, 1.0, 1.0, 1.0, 10};
  CHECK_THROWS_AS(weight_decay_drift_solution(0.5, loss, cfg, 1.0), Error);
}

TEST_CASE("1d quadratic solution") {
  ObjectiveConfig cfg{1.0, 1.0, 0.0, 1.0, 10};
  CHECK(quad_1d_solution(1.0, 0.0, 1.0, cfg, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(quad_1d_solution(0.7, 0.2, 3.0, cfg, 0.0) == 0.7);
  CHECK(quad_1d_solution(0.7, 0.2, 3.0, cfg, 100.0) == doctest::Approx(0.2));
}

TEST_CASE("every closed form satisfies its EL equation at second order") {
  std::mt19937_64 rng(6);
  const auto loss = random_quadratic(rng, 3);
  ObjectiveConfig cfg{1.0, 1.0, 0.2, 1.0, 10};
  const double horizon = 4.0;

  auto mom = momentum_spectral(loss, cfg);
  CHECK(residual_order([&](double t) { return mom.at(t); }, loss, cfg, nullptr, horizon) >= 1.8);

  const Matrix g = testsupport::random_spd(rng, 3);
  auto nat = natural_momentum_spectral(loss, cfg, g);
  const auto metric = GeometrySpec::with_metric(g);
  CHECK(residual_order([&](double t) { return nat.at(t); }, loss, cfg, &metric, horizon) >= 1.8);

  Matrix j(2, 2);
  j << 0.0, -0.7, 0.7, 0.0;
  Vector g2(2), th0(2);
  g2 << 0.5, -0.3;
  th0 << 1.0, 1.0;
  auto rot = rotation_drift_spectral(j, 1.5, g2, th0, cfg);
  QuadraticLoss iso(th0, 0.0, g2, 1.5 * Matrix::Identity(2, 2));
  const auto rot_geo = GeometrySpec::with_drift(j);
  const double rot_order = residual_order([&](double t) { return rot.at(t); }, iso, cfg, &rot_geo, horizon);
  CHECK(rot_order >= 1.8);
  // and the residual is small in absolute terms, so the drift sign is right
  CHECK(el_residual(sample_trajectory([&](double t) { return rot.at(t); }, horizon, 400), iso, cfg, &rot_geo).max_norm <
        1e-3);

  const double jj = 0.6;
  auto wd = weight_decay_spectral(jj, loss, cfg);
  const auto wd_geo = GeometrySpec::with_drift(jj * Matrix::Identity(3, 3));
  CHECK(residual_order([&](double t) { return wd.at(t); }, loss, cfg, &wd_geo, horizon) >= 1.8);
  CHECK(el_residual(sample_trajectory([&](double t) { return wd.at(t); }, horizon, 400), loss, cfg, &wd_geo).max_norm <
        1e-3);

  QuadraticLoss one(Vector::Constant(1, 0.5), 0.0, Vector::Constant(1, -1.0), Matrix::Constant(1, 1, 2.0));
  const double star = one.minimizer()(0);
  CHECK(residual_order([&](double t) { return Vector::Constant(1, quad_1d_solution(0.5, star, 2.0, cfg, t)); }, one,
                       cfg, nullptr, horizon) >= 1.8);
}

TEST_CASE("weight decay at gamma = 0 also solves the decay-drift equation") {
  // at γ = 0 the two drift signs give the same (j−γ)j = j² shift
  std::mt19937_64 rng(8);
  const auto loss = random_quadratic(rng, 2);
  ObjectiveConfig cfg{1.0, 1.0, 0.0, 1.0, 10};
  auto wd = weight_decay_spectral(0.8, loss, cfg);
  const auto decay = GeometrySpec::with_drift(-0.8 * Matrix::Identity(2, 2));
  CHECK(residual_order([&](double t) { return wd.at(t); }, loss, cfg, &decay, 4.0) >= 1.8);
}

TEST_CASE("nongradient diagnostic") {
  const double gamma = 0.3;
  DriftField decay{[](const Vector& x) { return Vector(-0.5 * x); }, {}};
  const auto d = nongradient_diagnostic(decay, Vector::Ones(2), gamma);
  CHECK(d.is_gradient_field);
  CHECK((d.gamma_eff - gamma * Matrix::Identity(2, 2)).norm() < 1e-8);

  Matrix j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  DriftField rot{[j](const Vector& x) { return Vector(j * x); }, [j](const Vector&) { return j; }};
  const auto r = nongradient_diagnostic(rot, Vector::Ones(2), gamma);
  CHECK_FALSE(r.is_gradient_field);
  CHECK((r.gamma_eff - (gamma * Matrix::Identity(2, 2) + 2.0 * j)).norm() < 1e-14);

  DriftField none{[](const Vector& x) { return Vector(Vector::Zero(x.size())); }, {}};
  const auto z = nongradient_diagnostic(none, Vector::Ones(3), gamma);
  CHECK(z.is_gradient_field);
  CHECK((z.gamma_eff - gamma * Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("stable branch decays monotonically on isotropic problems") {
  QuadraticLoss iso(Vector::Ones(3), 0.0, Vector::Constant(3, 0.2), 1.7 * Matrix::Identity(3, 3));
  for (double gamma : {0.0, 1.0, 10.0}) {
    ObjectiveConfig cfg{1.0, 1.0, gamma, 1.0, 10};
    const auto s = momentum_spectral(iso, cfg);
    double prev = 1e300;
    for (int i = 1; i <= 200; ++i) {
      const double dist = (s.at(0.5 * i) - s.target).norm();
      CHECK(dist <= prev);
      prev = dist;
    }
    CHECK(prev < 1e-2 * (s.base - s.target).norm());
  }
}
