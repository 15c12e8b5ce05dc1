#include "learnpath/adaptive.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "learnpath/error.hpp"
#include "learnpath/matfun.hpp"

namespace learnpath {

void AdaptiveParams::validate() const {
  std::ostringstream msg;
  if (!(eta > 0.0)) msg << "eta must be positive";
  else if (!(k > 0.0)) msg << "k must be positive";
  else if (!(gamma >= 0.0)) msg << "gamma must be non-negative";
  else if (!(kappa > 0.0)) msg << "kappa must be positive";
  else if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0)) msg << "alpha1, alpha2 must be non-negative";
  else if (!(xi1 > 0.0) || !(xi2 > 0.0)) msg << "xi1, xi2 must be positive";
  else if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) msg << "sigma1, sigma2 must be positive";
  else return;
  throw_error(ErrorCode::kInvalidInput, "adaptive params: " + msg.str());
}

BeliefState BeliefState::initial(const Vector& theta, const Vector& first_gradient) {
  const auto n = theta.size();
  BeliefState s;
  s.theta = theta;
  s.theta0 = theta;
  s.m = first_gradient;
  s.v = Vector::Ones(n);
  s.theta_dot = s.m_dot = s.v_dot = Vector::Zero(n);
  return s;
}

void BeliefState::validate() const {
  const auto n = theta.size();
  if (n == 0 || theta0.size() != n || m.size() != n || v.size() != n || theta_dot.size() != n ||
      m_dot.size() != n || v_dot.size() != n) {
    throw_error(ErrorCode::kInvalidInput, "belief state: inconsistent dimensions");
  }
  if (!theta.allFinite() || !theta0.allFinite() || !m.allFinite() || !v.allFinite() || !theta_dot.allFinite() ||
      !m_dot.allFinite() || !v_dot.allFinite()) {
    throw_error(ErrorCode::kNumericOverflow, "belief state: non-finite entry");
  }
  if ((v.array() <= 0.0).any()) throw_error(ErrorCode::kInvalidInput, "belief state: variances must be positive");
}

namespace {

void check_gradient(const BeliefState& s, const Vector& g) {
  if (g.size() != s.theta.size()) throw_error(ErrorCode::kInvalidInput, "adaptive: gradient dimension mismatch");
  if (!g.allFinite()) throw_error(ErrorCode::kInvalidInput, "adaptive: non-finite observed gradient");
}

void floor_variances(BeliefState& s) {
  for (Eigen::Index i = 0; i < s.v.size(); ++i) {
    if (s.v(i) < kVarianceFloor) {
      s.v(i) = kVarianceFloor;
      ++s.floor_hits;
    }
  }
}

void check_finite(const BeliefState& s, const char* where) {
  if (!s.theta.allFinite() || !s.m.allFinite() || !s.v.allFinite() || !s.theta_dot.allFinite() ||
      !s.m_dot.allFinite() || !s.v_dot.allFinite()) {
    throw_error(ErrorCode::kNumericOverflow, std::string(where) + ": state became non-finite");
  }
}

BeliefState axpy(const BeliefState& s, double h, const BeliefState& d) {
  BeliefState out = s;
  out.theta += h * d.theta;
  out.m += h * d.m;
  out.v += h * d.v;
  out.theta_dot += h * d.theta_dot;
  out.m_dot += h * d.m_dot;
  out.v_dot += h * d.v_dot;
  return out;
}

// Time derivative of the augmented state, packed as a BeliefState.
BeliefState derivative(ObservationModel model, const BeliefState& s, const Vector& g, const AdaptiveParams& p) {
  const BeliefAcceleration a = belief_acceleration(model, s, g, p);
  BeliefState d;
  d.theta = s.theta_dot;
  d.m = s.m_dot;
  d.v = s.v_dot;
  d.theta_dot = a.theta;
  d.m_dot = a.m;
  d.v_dot = a.v;
  return d;
}

BeliefState rk4_step(ObservationModel model, const BeliefState& state, const Vector& g, const AdaptiveParams& p,
                     double dt, const char* where) {
  p.validate();
  state.validate();
  check_gradient(state, g);
  if (!(dt > 0.0)) throw_error(ErrorCode::kInvalidInput, std::string(where) + ": dt must be positive");
  const BeliefState k1 = derivative(model, state, g, p);
  const BeliefState k2 = derivative(model, axpy(state, 0.5 * dt, k1), g, p);
  const BeliefState k3 = derivative(model, axpy(state, 0.5 * dt, k2), g, p);
  const BeliefState k4 = derivative(model, axpy(state, dt, k3), g, p);
  BeliefState out = axpy(state, dt / 6.0, k1);
  out = axpy(out, dt / 3.0, k2);
  out = axpy(out, dt / 3.0, k3);
  out = axpy(out, dt / 6.0, k4);
  check_finite(out, where);
  floor_variances(out);
  return out;
}

double stable_velocity(double force, double stiffness, double gamma, const char* row) {
  const double denom = 0.5 * gamma + std::sqrt(std::max(0.0, 0.25 * gamma * gamma + stiffness));
  if (force == 0.0) return 0.0;
  if (!(denom > 1e-300)) {
    throw_error(ErrorCode::kInvalidInput, std::string("stable branch: no decaying mode for the ") + row +
                                              " row (gamma = 0 and non-positive stiffness)");
  }
  return -force / denom;
}

}  // namespace

BeliefAcceleration belief_acceleration(ObservationModel model, const BeliefState& s, const Vector& g,
                                       const AdaptiveParams& p) {
  const auto n = s.theta.size();
  BeliefAcceleration a{Vector(n), Vector(n), Vector(n)};
  const bool full = model == ObservationModel::kFull;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double delta = s.theta(i) - s.theta0(i);
    const double v = std::max(s.v(i), kVarianceFloor);
    const double m = s.m(i);
    const double resid = g(i) - m;
    a.theta(i) = p.gamma * s.theta_dot(i) + p.eta * p.k * (m + p.kappa * v * delta);
    const double m_obs = full ? (m - g(i)) / v : (m - g(i)) / (p.sigma1 * p.sigma1);
    a.m(i) = p.gamma * (s.m_dot(i) + p.alpha1 * m) + p.alpha1 * p.alpha1 * m +
             p.xi1 * p.xi1 * (p.k * delta + m_obs);
    const double v_obs =
        full ? (v - resid * resid) / (2.0 * v * v) : (v - resid * resid) / (p.sigma2 * p.sigma2);
    a.v(i) = p.gamma * (s.v_dot(i) + p.alpha2 * v) + p.alpha2 * p.alpha2 * v +
             p.xi2 * p.xi2 * (0.5 * p.k * p.kappa * delta * delta + v_obs);
  }
  return a;
}

BeliefState el_step_full(const BeliefState& state, const Vector& g_obs, const AdaptiveParams& p, double dt) {
  return rk4_step(ObservationModel::kFull, state, g_obs, p, dt, "el_step_full");
}

BeliefState el_step_simplified(const BeliefState& state, const Vector& g_obs, const AdaptiveParams& p, double dt) {
  return rk4_step(ObservationModel::kSimplified, state, g_obs, p, dt, "el_step_simplified");
}

void project_stable_velocities(ObservationModel model, BeliefState& s, const Vector& g, const AdaptiveParams& p) {
  p.validate();
  s.validate();
  check_gradient(s, g);
  const bool full = model == ObservationModel::kFull;
  const double a1 = p.gamma * p.alpha1 + p.alpha1 * p.alpha1;
  const double a2 = p.gamma * p.alpha2 + p.alpha2 * p.alpha2;
  for (Eigen::Index i = 0; i < s.theta.size(); ++i) {
    const double delta = s.theta(i) - s.theta0(i);
    const double v = s.v(i);
    const double m = s.m(i);
    const double resid = g(i) - m;
    const double ek = p.eta * p.k;
    s.theta_dot(i) = stable_velocity(ek * (m + p.kappa * v * delta), ek * p.kappa * v, p.gamma, "theta");

    const double m_scale = full ? v : p.sigma1 * p.sigma1;
    const double fm = a1 * m + p.xi1 * p.xi1 * (p.k * delta + (m - g(i)) / m_scale);
    s.m_dot(i) = stable_velocity(fm, a1 + p.xi1 * p.xi1 / m_scale, p.gamma, "m");

    double obs, obs_slope;
    if (full) {
      obs = (v - resid * resid) / (2.0 * v * v);
      obs_slope = (2.0 * resid * resid - v) / (2.0 * v * v * v);
    } else {
      obs = (v - resid * resid) / (p.sigma2 * p.sigma2);
      obs_slope = 1.0 / (p.sigma2 * p.sigma2);
    }
    const double fv = a2 * v + p.xi2 * p.xi2 * (0.5 * p.k * p.kappa * delta * delta + obs);
    s.v_dot(i) = stable_velocity(fv, a2 + p.xi2 * p.xi2 * obs_slope, p.gamma, "v");
  }
}

Vector adaptive_rule(const Vector& m, const Vector& v, double eta, double k, double dt) {
  if (m.size() != v.size()) throw_error(ErrorCode::kInvalidInput, "adaptive_rule: m and v dimensions differ");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0)) {
      std::ostringstream msg;
      msg << "adaptive_rule: variance v[" << i << "] = " << v(i) << " is not positive";
      throw_error(ErrorCode::kInvalidInput, msg.str());
    }
  }
  return -std::sqrt(eta * k) * dt * (m.array() / v.array().sqrt()).matrix();
}

BeliefState reduced_step(const BeliefState& state, const Vector& g, const AdaptiveParams& p, double dt) {
  p.validate();
  state.validate();
  check_gradient(state, g);
  if (!(dt > 0.0)) throw_error(ErrorCode::kInvalidInput, "reduced_step: dt must be positive");
  if (!(p.gamma > 0.0)) throw_error(ErrorCode::kInvalidInput, "reduced_step: the reduced system needs gamma > 0");
  BeliefState out = state;
  const Vector delta = state.theta - state.theta0;
  const Vector resid = g - state.m;
  out.m_dot = -p.alpha1 * state.m.array() -
              (p.xi1 * p.xi1 / p.gamma) * (p.k * delta.array() + (state.m - g).array() / (p.sigma1 * p.sigma1));
  out.v_dot = -p.alpha2 * state.v.array() -
              (p.xi2 * p.xi2 / p.gamma) * (0.5 * p.k * p.kappa * delta.array().square() +
                                           (state.v.array() - resid.array().square()) / (p.sigma2 * p.sigma2));
  const Vector step = adaptive_rule(state.m, p.kappa * state.v, p.eta, p.k, dt);
  out.theta_dot = step / dt;
  out.theta += step;
  out.m += dt * out.m_dot;
  out.v += dt * out.v_dot;
  check_finite(out, "reduced_step");
  floor_variances(out);
  return out;
}

BeliefState driver_step(BeliefDriver driver, const BeliefState& state, const Vector& g, const AdaptiveParams& p,
                        double dt) {
  BeliefState s = state;
  s.theta0 = s.theta;
  switch (driver) {
    case BeliefDriver::kReduced:
      return reduced_step(s, g, p, dt);
    case BeliefDriver::kFull:
      project_stable_velocities(ObservationModel::kFull, s, g, p);
      return el_step_full(s, g, p, dt);
    case BeliefDriver::kSimplified:
      project_stable_velocities(ObservationModel::kSimplified, s, g, p);
      return el_step_simplified(s, g, p, dt);
  }
  throw_error(ErrorCode::kInvalidInput, "drive_beliefs: unknown driver");
}

OUProbeResult ou_probe(const OUProbeParams& params) {
  if (!(params.tau > 0.0) || !(params.sigma >= 0.0) || !(params.dt > 0.0)) {
    throw_error(ErrorCode::kInvalidInput, "ou_probe: need tau > 0, sigma >= 0, dt > 0");
  }
  if (params.dt > params.tau / 10.0) {
    std::ostringstream msg;
    msg << "ou_probe: dt = " << params.dt << " exceeds tau/10 = " << params.tau / 10.0;
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
  const auto n = params.hessian.rows();
  if (n == 0 || params.hessian.cols() != n || params.gradient.size() != n || params.theta0.size() != n) {
    throw_error(ErrorCode::kInvalidInput, "ou_probe: inconsistent dimensions");
  }
  const matfun::SymEig eig = matfun::sym_eig(params.hessian);
  matfun::check_spd(eig, "ou_probe (Hessian)");
  const double lmax = eig.eigenvalues.maxCoeff();
  if (params.dt * lmax / params.tau >= 1.0) {
    throw_error(ErrorCode::kInvalidInput, "ou_probe: dt * lambda_max / tau must be below 1 for a stable chain");
  }
  const std::int64_t burn = static_cast<std::int64_t>(std::ceil(10.0 * params.tau / params.dt));
  if (params.n_steps <= burn) {
    throw_error(ErrorCode::kInvalidInput, "ou_probe: n_steps must exceed the 10 tau burn-in");
  }

  const Matrix& h = params.hessian;
  const Vector mu = params.theta0 - matfun::spd_inverse(h) * params.gradient;
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise = params.sigma * std::sqrt(params.dt);
  const double rate = params.dt / params.tau;

  Vector x = mu;
  Vector grad(n), w(n);
  Matrix acc = Matrix::Zero(n, n);
  std::int64_t samples = 0;
  for (std::int64_t step = 0; step < params.n_steps; ++step) {
    grad = params.gradient + h * (x - params.theta0);
    if (step >= burn) {
      acc.noalias() += grad * grad.transpose();
      ++samples;
    }
    for (Eigen::Index i = 0; i < n; ++i) w(i) = normal(rng);
    x += -rate * grad + noise * w;
  }
  if (!acc.allFinite()) throw_error(ErrorCode::kNumericOverflow, "ou_probe: simulation overflowed");

  OUProbeResult r;
  r.samples = samples;
  r.empirical = acc / static_cast<double>(samples);
  const double s2 = params.sigma * params.sigma;
  r.predicted = s2 / (2.0 * params.tau * params.tau) * h;
  r.predicted_stationary = 0.5 * s2 * params.tau * h;
  r.predicted_discrete = matfun::sym_function(
      eig, [&](double lam) { return 0.5 * s2 * params.tau * lam / (1.0 - params.dt * lam / (2.0 * params.tau)); });
  r.relative_error = (r.empirical - r.predicted).norm() / std::max(1e-300, r.predicted.norm());
  return r;
}

}  // namespace learnpath
