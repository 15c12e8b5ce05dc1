#include "learnpath/objective.hpp"

#include <cmath>
#include <sstream>

#include "learnpath/error.hpp"

namespace learnpath {

void ObjectiveConfig::validate() const {
  std::ostringstream msg;
  if (!(eta > 0.0) || !std::isfinite(eta)) msg << "eta must be positive (got " << eta << ")";
  else if (!(k > 0.0) || !std::isfinite(k)) msg << "k must be positive (got " << k << ")";
  else if (!(gamma >= 0.0) || !std::isfinite(gamma)) msg << "gamma must be non-negative (got " << gamma << ")";
  else if (!(horizon > 0.0) || !std::isfinite(horizon)) msg << "horizon must be positive (got " << horizon << ")";
  else if (segments < 1) msg << "segments must be >= 1 (got " << segments << ")";
  else return;
  throw_error(ErrorCode::kInvalidInput, "objective config: " + msg.str());
}

Trajectory Trajectory::grid(double horizon, int segments) {
  if (segments < 1 || !(horizon > 0.0)) throw_error(ErrorCode::kInvalidInput, "trajectory grid: need T > 0, N >= 1");
  Trajectory t;
  t.times = Vector(segments + 1);
  for (int j = 0; j <= segments; ++j) t.times(j) = horizon * j / segments;
  return t;
}

Trajectory Trajectory::straight_line(const Vector& from, const Vector& to, double horizon, int segments) {
  if (from.size() != to.size()) throw_error(ErrorCode::kInvalidInput, "straight_line: endpoint dimensions differ");
  Trajectory t = grid(horizon, segments);
  t.states.reserve(segments + 1);
  for (int j = 0; j <= segments; ++j) {
    const double s = static_cast<double>(j) / segments;
    t.states.push_back(j == segments ? to : Vector(from + s * (to - from)));
  }
  return t;
}

double Trajectory::dt() const {
  if (times.size() < 2) return 0.0;
  return (times(times.size() - 1) - times(0)) / (times.size() - 1);
}

void Trajectory::validate() const {
  if (times.size() < 2) throw_error(ErrorCode::kInvalidInput, "trajectory: need at least two nodes");
  if (static_cast<Eigen::Index>(states.size()) != times.size()) {
    throw_error(ErrorCode::kInvalidInput, "trajectory: state count does not match time count");
  }
  const double h = dt();
  if (!(h > 0.0)) throw_error(ErrorCode::kInvalidInput, "trajectory: times must increase");
  for (Eigen::Index j = 1; j < times.size(); ++j) {
    if (std::abs(times(j) - times(j - 1) - h) > 1e-12 * std::max(1.0, std::abs(times(j)))) {
      throw_error(ErrorCode::kInvalidInput, "trajectory: time grid is not uniform");
    }
  }
  const auto d = states.front().size();
  for (const auto& s : states) {
    if (s.size() != d) throw_error(ErrorCode::kInvalidInput, "trajectory: states have different dimensions");
  }
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
  else comp_ += (x - t) + sum_;
  sum_ = t;
}

namespace {

void check_inputs(const Trajectory& traj, const Landscape& landscape, const ObjectiveConfig& cfg,
                  const GeometrySpec* geometry) {
  cfg.validate();
  traj.validate();
  if (traj.dim() != landscape.dim()) {
    std::ostringstream msg;
    msg << "objective: trajectory dimension " << traj.dim() << " does not match landscape dimension "
        << landscape.dim();
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
  if (geometry) geometry->validate(landscape.dim());
}

}  // namespace

ObjectiveValue eval_objective(const Trajectory& traj, const Landscape& landscape, const ObjectiveConfig& cfg,
                              const GeometrySpec* geometry) {
  check_inputs(traj, landscape, cfg, geometry);
  const int n = traj.segments();
  const double h = traj.dt();
  ObjectiveValue out;
  out.profile.kinetic.resize(n);
  out.profile.potential.resize(n + 1);
  CompensatedSum total;
  for (int j = 0; j <= n; ++j) {
    const double weight = std::exp(-cfg.gamma * traj.times(j)) * h;
    const double pe = cfg.k * landscape.value(traj.states[j]);
    out.profile.potential[j] = pe;
    double ke = 0.0;
    if (j < n) {
      Vector u = (traj.states[j + 1] - traj.states[j]) / h;
      if (geometry) {
        u -= geometry->drift(traj.states[j]);
        ke = 0.5 * u.dot(geometry->metric * u) / cfg.eta;
      } else {
        ke = 0.5 * u.squaredNorm() / cfg.eta;
      }
      out.profile.kinetic[j] = ke;
    }
    total.add((ke + pe) * weight);
  }
  out.value = total.value();
  if (!std::isfinite(out.value)) throw_error(ErrorCode::kNumericOverflow, "eval_objective: objective is not finite");
  return out;
}

std::vector<Vector> objective_gradient_all(const Trajectory& traj, const Landscape& landscape,
                                           const ObjectiveConfig& cfg, const GeometrySpec* geometry) {
  check_inputs(traj, landscape, cfg, geometry);
  const int n = traj.segments();
  const int d = traj.dim();
  const double h = traj.dt();
  std::vector<Vector> grad(n + 1, Vector::Zero(d));
  for (int j = 0; j <= n; ++j) {
    const double weight = std::exp(-cfg.gamma * traj.times(j)) * h;
    grad[j] += weight * cfg.k * landscape.eval(traj.states[j]).gradient;
    if (j == n) break;
    Vector u = (traj.states[j + 1] - traj.states[j]) / h;
    Vector gu;
    if (geometry) {
      u -= geometry->drift(traj.states[j]);
      gu = geometry->metric * u;
    } else {
      gu = u;
    }
    const Vector p = (weight / cfg.eta) * gu;
    grad[j + 1] += p / h;
    grad[j] -= p / h;
    if (geometry) grad[j] -= geometry->drift_matrix.transpose() * p;
  }
  return grad;
}

std::vector<Vector> objective_gradient(const Trajectory& traj, const Landscape& landscape,
                                       const ObjectiveConfig& cfg, const GeometrySpec* geometry) {
  if (traj.segments() < 2) throw_error(ErrorCode::kInvalidInput, "objective_gradient: need N >= 2");
  auto all = objective_gradient_all(traj, landscape, cfg, geometry);
  return {all.begin() + 1, all.end() - 1};
}

}  // namespace learnpath
