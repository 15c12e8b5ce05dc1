#include "learnpath/continual.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "learnpath/error.hpp"
#include "learnpath/matfun.hpp"

namespace learnpath {
namespace {

void require_positive(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0)) {
      std::ostringstream msg;
      msg << what << ": variance " << i << " is " << v(i) << ", must be > 0";
      throw_error(ErrorCode::kInvalidInput, msg.str());
    }
  }
}

void require_finite(const DistributionalState& s, const char* what) {
  if (!s.mu.allFinite() || !s.v.allFinite() || !s.mu_dot.allFinite() || !s.v_dot.allFinite()) {
    throw_error(ErrorCode::kNumericOverflow, std::string(what) + ": non-finite state");
  }
}

void check_compatible(const DistributionalState& s, const QuadraticLoss& loss, const char* what) {
  s.validate();
  if (loss.dim() != s.dim()) {
    std::ostringstream msg;
    msg << what << ": loss dimension " << loss.dim() << " does not match state dimension " << s.dim();
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
}

// g(μ0) + H(μ − μ0)
Vector local_gradient(const DistributionalState& s, const QuadraticLoss& loss) {
  return loss.eval(s.mu0).gradient + loss.hessian() * (s.mu - s.mu0);
}

void floor_variances(DistributionalState& s) {
  for (Eigen::Index i = 0; i < s.v.size(); ++i) {
    if (s.v(i) < kContinualVarianceFloor) {
      s.v(i) = kContinualVarianceFloor;
      ++s.floor_hits;
    }
  }
}

}  // namespace

DistributionalState DistributionalState::initial(const Vector& mu, const Vector& v) {
  DistributionalState s;
  s.mu = mu;
  s.v = v;
  s.mu_dot = Vector::Zero(mu.size());
  s.v_dot = Vector::Zero(mu.size());
  s.mu0 = mu;
  s.validate();
  return s;
}

void DistributionalState::validate() const {
  const auto n = mu.size();
  if (n == 0) throw_error(ErrorCode::kInvalidInput, "DistributionalState: empty state");
  if (v.size() != n || mu_dot.size() != n || v_dot.size() != n || mu0.size() != n) {
    throw_error(ErrorCode::kInvalidInput, "DistributionalState: component sizes differ");
  }
  require_positive(v, "DistributionalState");
}

void TaskSchedule::validate(int dim) const {
  if (segments.empty()) throw_error(ErrorCode::kInvalidInput, "TaskSchedule: no segments");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    std::ostringstream where;
    where << "TaskSchedule: segment " << i;
    if (!(segments[i].duration > 0.0) || !std::isfinite(segments[i].duration)) {
      throw_error(ErrorCode::kInvalidInput, where.str() + " has non-positive duration");
    }
    if (segments[i].loss.dim() != dim) {
      throw_error(ErrorCode::kInvalidInput, where.str() + " loss dimension does not match the state");
    }
  }
}

double TaskSchedule::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

KLRate kl_rate(const Vector& mu1, const Vector& v1, const Vector& mu0, const Vector& v0, double dt) {
  if (mu1.size() != v1.size() || mu0.size() != v0.size() || mu1.size() != mu0.size()) {
    throw_error(ErrorCode::kInvalidInput, "kl_rate: dimension mismatch");
  }
  if (!(dt > 0.0)) throw_error(ErrorCode::kInvalidInput, "kl_rate: dt must be positive");
  require_positive(v1, "kl_rate (p)");
  require_positive(v0, "kl_rate (q)");
  KLRate out{0.0, 0.0};
  for (Eigen::Index i = 0; i < mu1.size(); ++i) {
    const double dmu = mu1(i) - mu0(i);
    const double dv = v1(i) - v0(i);
    const double r = dv / v0(i);
    // log(v0/v1) + v1/v0 − 1 = r − log1p(r), accurate for small r
    out.exact += 0.5 * ((r - std::log1p(r)) + dmu * dmu / v0(i));
    const double mu_rate = dmu / dt;
    const double v_rate = dv / dt;
    out.quadratic += (0.5 * mu_rate * mu_rate / v0(i) + 0.25 * v_rate * v_rate / (v0(i) * v0(i))) * dt * dt;
  }
  return out;
}

DistributionalAcceleration distributional_acceleration(const DistributionalState& s, const QuadraticLoss& loss,
                                                       const ObjectiveConfig& cfg) {
  const Vector g = local_gradient(s, loss);
  const Vector h = loss.hessian().diagonal();
  const auto v = s.v.array();
  DistributionalAcceleration a;
  a.mu = ((s.v_dot.array() / v + cfg.gamma) * s.mu_dot.array() + cfg.eta * cfg.k * v * g.array()).matrix();
  a.v = (cfg.gamma * s.v_dot.array() + cfg.eta * (cfg.k * h.array() * v * v - v) +
         s.v_dot.array().square() / v - s.mu_dot.array().square())
            .matrix();
  return a;
}

DistributionalState el_step(const DistributionalState& state, const QuadraticLoss& loss, const ObjectiveConfig& cfg,
                            double dt) {
  check_compatible(state, loss, "el_step");
  if (!(dt > 0.0)) throw_error(ErrorCode::kInvalidInput, "el_step: dt must be positive");
  require_finite(state, "el_step");

  struct Deriv {
    Vector mu, v, mu_dot, v_dot;
  };
  auto deriv = [&](const DistributionalState& s) {
    const auto a = distributional_acceleration(s, loss, cfg);
    return Deriv{s.mu_dot, s.v_dot, a.mu, a.v};
  };
  auto advance = [&](const Deriv& d, double h) {
    DistributionalState s = state;
    s.mu += h * d.mu;
    s.v += h * d.v;
    s.mu_dot += h * d.mu_dot;
    s.v_dot += h * d.v_dot;
    // intermediate stages only need a usable variance
    s.v = s.v.cwiseMax(kContinualVarianceFloor);
    return s;
  };
  const Deriv k1 = deriv(state);
  const Deriv k2 = deriv(advance(k1, 0.5 * dt));
  const Deriv k3 = deriv(advance(k2, 0.5 * dt));
  const Deriv k4 = deriv(advance(k3, dt));

  DistributionalState out = state;
  out.mu += dt / 6.0 * (k1.mu + 2.0 * k2.mu + 2.0 * k3.mu + k4.mu);
  out.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
  out.mu_dot += dt / 6.0 * (k1.mu_dot + 2.0 * k2.mu_dot + 2.0 * k3.mu_dot + k4.mu_dot);
  out.v_dot += dt / 6.0 * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
  require_finite(out, "el_step");
  floor_variances(out);
  return out;
}

DistributionalState overdamped_step(const DistributionalState& state, const QuadraticLoss& loss,
                                    const ObjectiveConfig& cfg, double dt) {
  check_compatible(state, loss, "overdamped_step");
  if (!(dt > 0.0)) throw_error(ErrorCode::kInvalidInput, "overdamped_step: dt must be positive");
  if (!(cfg.gamma > 0.0)) throw_error(ErrorCode::kInvalidInput, "overdamped_step: requires gamma > 0");
  require_finite(state, "overdamped_step");

  const Vector g = local_gradient(state, loss);
  const auto h = loss.hessian().diagonal().array();
  const auto v = state.v.array();
  DistributionalState out = state;
  out.mu_dot = (-(cfg.eta * cfg.k / cfg.gamma) * v * g.array()).matrix();
  out.v_dot = ((cfg.eta / cfg.gamma) * (v - cfg.k * h * v * v)).matrix();
  out.mu += dt * out.mu_dot;
  out.v += dt * out.v_dot;
  require_finite(out, "overdamped_step");
  floor_variances(out);
  return out;
}

void project_stable_velocities(DistributionalState& s, const QuadraticLoss& loss, const ObjectiveConfig& cfg) {
  check_compatible(s, loss, "project_stable_velocities");
  const double half = 0.5 * cfg.gamma;
  auto decay = [half](double stiffness) {
    const double denom = half + std::sqrt(std::max(0.0, half * half + stiffness));
    return denom > 0.0 ? 1.0 / denom : 0.0;
  };
  // μ rows couple through H; the metric is diag(1/v)
  const Vector force = cfg.eta * cfg.k * s.v.cwiseProduct(local_gradient(s, loss));
  const Matrix metric = s.v.cwiseInverse().asDiagonal();
  const Matrix stiffness = cfg.eta * cfg.k * 0.5 * (loss.hessian() + loss.hessian().transpose());
  s.mu_dot = -matfun::pair_function(metric, stiffness, decay) * force;

  const Vector h = loss.hessian().diagonal();
  for (Eigen::Index i = 0; i < s.v.size(); ++i) {
    const double v = s.v(i);
    const double f = cfg.eta * (cfg.k * h(i) * v * v - v) - s.mu_dot(i) * s.mu_dot(i);
    const double kv = cfg.eta * (2.0 * cfg.k * h(i) * v - 1.0);
    s.v_dot(i) = -f * decay(kv);
  }
}

DistributionalTrace run_schedule(const DistributionalState& initial, const TaskSchedule& schedule,
                                 const ObjectiveConfig& cfg, double dt, ContinualMode mode, int record_every) {
  initial.validate();
  schedule.validate(initial.dim());
  if (!(dt > 0.0)) throw_error(ErrorCode::kInvalidInput, "run_schedule: dt must be positive");
  if (record_every < 1) throw_error(ErrorCode::kInvalidInput, "run_schedule: record_every must be >= 1");

  DistributionalTrace trace;
  DistributionalState s = initial;
  double t = 0.0;
  trace.times.push_back(t);
  trace.segment.push_back(0);
  trace.states.push_back(s);

  for (std::size_t seg = 0; seg < schedule.segments.size(); ++seg) {
    const auto& segment = schedule.segments[seg];
    const auto steps = std::max<long long>(1, std::llround(segment.duration / dt));
    const double t_start = t;
    s.mu0 = s.mu;
    try {
      for (long long n = 1; n <= steps; ++n) {
        if (mode == ContinualMode::kOverdamped) {
          s = overdamped_step(s, segment.loss, cfg, dt);
        } else {
          project_stable_velocities(s, segment.loss, cfg);
          s = el_step(s, segment.loss, cfg, dt);
        }
        t = t_start + static_cast<double>(n) * dt;
        if (n % record_every == 0 || n == steps) {
          trace.times.push_back(t);
          trace.segment.push_back(static_cast<int>(seg));
          trace.states.push_back(s);
        }
      }
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "run_schedule: segment " << seg << ": " << e.what();
      throw Error(e.code(), msg.str());
    }
  }
  return trace;
}

}  // namespace learnpath
