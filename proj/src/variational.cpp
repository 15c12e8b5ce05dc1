#include "learnpath/variational.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "learnpath/error.hpp"
#include "learnpath/matfun.hpp"

namespace learnpath {

void DirectOptConfig::validate() const {
  if (max_iters < 1) throw_error(ErrorCode::kInvalidInput, "direct_optimize: max_iters must be >= 1");
  if (!(step_size > 0.0)) throw_error(ErrorCode::kInvalidInput, "direct_optimize: step_size must be positive");
  if (!(convergence_tol > 0.0)) throw_error(ErrorCode::kInvalidInput, "direct_optimize: tolerance must be positive");
  if (divergence_patience < 1) throw_error(ErrorCode::kInvalidInput, "direct_optimize: patience must be >= 1");
}

namespace {

// Symmetric positive definite block-tridiagonal system, solved by block
// elimination. diag[i] are the diagonal blocks, upper[i] couples i and i+1.
class BlockTridiagonal {
 public:
  BlockTridiagonal(int blocks, int dim)
      : dim_(dim), diag_(blocks, Matrix::Zero(dim, dim)), upper_(blocks > 0 ? blocks - 1 : 0, Matrix::Zero(dim, dim)) {}

  Matrix& diag(int i) { return diag_[i]; }
  Matrix& upper(int i) { return upper_[i]; }

  std::vector<Vector> solve(const std::vector<Vector>& rhs) const {
    const int m = static_cast<int>(diag_.size());
    std::vector<Eigen::LLT<Matrix>> factors;
    factors.reserve(m);
    std::vector<Vector> r(rhs);
    for (int i = 0; i < m; ++i) {
      Matrix d = diag_[i];
      if (i > 0) {
        const Matrix& c = upper_[i - 1];
        d -= c.transpose() * factors[i - 1].solve(c);
        r[i] -= c.transpose() * factors[i - 1].solve(r[i - 1]);
      }
      factors.emplace_back(0.5 * (d + d.transpose()));
      if (factors.back().info() != Eigen::Success) {
        throw_error(ErrorCode::kSingularMatrix, "direct_optimize: model Hessian lost positive definiteness");
      }
    }
    std::vector<Vector> x(m, Vector::Zero(dim_));
    for (int i = m - 1; i >= 0; --i) {
      Vector rhs_i = r[i];
      if (i + 1 < m) rhs_i -= upper_[i] * x[i + 1];
      x[i] = factors[i].solve(rhs_i);
    }
    return x;
  }

 private:
  int dim_;
  std::vector<Matrix> diag_;
  std::vector<Matrix> upper_;
};

Matrix psd_part(const Matrix& h) {
  const matfun::SymEig e = matfun::sym_eig(h);
  return matfun::sym_function(e, [](double x) { return std::max(x, 0.0); });
}

}  // namespace

DirectOptResult direct_optimize(const Landscape& landscape, const Vector& theta_start, const Vector& theta_end,
                                const ObjectiveConfig& cfg, const DirectOptConfig& opt,
                                const GeometrySpec* geometry) {
  cfg.validate();
  opt.validate();
  const int d = landscape.dim();
  if (theta_start.size() != d || theta_end.size() != d) {
    throw_error(ErrorCode::kInvalidInput, "direct_optimize: endpoint dimension does not match landscape");
  }
  if (cfg.segments < 2) throw_error(ErrorCode::kInvalidInput, "direct_optimize: need N >= 2");
  if (geometry) geometry->validate(d);

  const int n = cfg.segments;
  const double h = cfg.dt();
  const bool free_end = opt.endpoint_policy == EndpointPolicy::kSearched;
  const int first = 1;
  const int last = free_end ? n : n - 1;
  const int blocks = last - first + 1;

  const Matrix g_metric = geometry ? geometry->metric : Matrix::Identity(d, d);
  const Matrix m_step = Matrix::Identity(d, d) + h * (geometry ? geometry->drift_matrix : Matrix::Zero(d, d));
  const Matrix kin_tail = m_step.transpose() * g_metric * m_step;
  const Matrix kin_cross = -m_step.transpose() * g_metric;

  std::vector<double> weight(n + 1);
  for (int j = 0; j <= n; ++j) weight[j] = std::exp(-cfg.gamma * j * h) * h;

  DirectOptResult res;
  res.trajectory = Trajectory::straight_line(theta_start, theta_end, cfg.horizon, n);
  Trajectory& traj = res.trajectory;
  double current = eval_objective(traj, landscape, cfg, geometry).value;

  int failures = 0;
  double trial_scale = opt.step_size;
  for (int iter = 0;; ++iter) {
    res.iterations = iter;
    const auto grad = objective_gradient_all(traj, landscape, cfg, geometry);

    BlockTridiagonal model(blocks, d);
    for (int s = 0; s < n; ++s) {
      const double c = weight[s] / (cfg.eta * h * h);
      const int left = s - first, right = s + 1 - first;
      if (left >= 0 && left < blocks) model.diag(left) += c * kin_tail;
      if (right >= 0 && right < blocks) model.diag(right) += c * g_metric;
      if (left >= 0 && right < blocks) model.upper(left) += c * kin_cross;
    }
    for (int j = first; j <= last; ++j) {
      model.diag(j - first) += weight[j] * cfg.k * psd_part(landscape.eval(traj.states[j]).hessian);
    }
    std::vector<Vector> rhs(grad.begin() + first, grad.begin() + last + 1);
    const std::vector<Vector> dir = model.solve(rhs);

    double step_norm = 0.0;
    double predicted = 0.0;
    for (int i = 0; i < blocks; ++i) {
      step_norm = std::max(step_norm, dir[i].cwiseAbs().maxCoeff());
      predicted += rhs[i].dot(dir[i]);
    }
    res.step_norm = step_norm;
    res.objective = current;
    if (step_norm <= opt.convergence_tol) {
      res.converged = true;
      return res;
    }
    if (iter >= opt.max_iters) return res;

    bool accepted = false;
    double s = trial_scale;
    for (int halving = 0; halving < 60; ++halving, s *= 0.5) {
      Trajectory trial = traj;
      for (int i = 0; i < blocks; ++i) trial.states[first + i] -= s * dir[i];
      double value;
      try {
        value = eval_objective(trial, landscape, cfg, geometry).value;
      } catch (const Error&) {
        continue;
      }
      if (std::isfinite(value) && value <= current - 1e-4 * s * predicted) {
        traj = std::move(trial);
        current = value;
        accepted = true;
        break;
      }
    }
    if (accepted) {
      failures = 0;
      trial_scale = opt.step_size;
      continue;
    }
    // No decrease left to find at working precision: stationary.
    if (predicted <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(current))) {
      res.converged = true;
      return res;
    }
    ++failures;
    trial_scale *= 1.0 / 1024.0;
    if (failures >= opt.divergence_patience) {
      std::ostringstream msg;
      msg << "direct_optimize: no decrease of J for " << failures << " consecutive iterations (iteration " << iter
          << ", J = " << current << ")";
      throw_error(ErrorCode::kOptimizationDiverged, msg.str());
    }
  }
}

EndpointSearchResult endpoint_search(const Landscape& landscape, const Vector& theta_start,
                                     const std::vector<Vector>& candidate_endpoints, const ObjectiveConfig& cfg,
                                     const DirectOptConfig& opt, const GeometrySpec* geometry) {
  if (candidate_endpoints.empty()) throw_error(ErrorCode::kInvalidInput, "endpoint_search: no candidates");
  std::vector<std::future<DirectOptResult>> runs;
  runs.reserve(candidate_endpoints.size());
  for (const auto& end : candidate_endpoints) {
    runs.push_back(std::async(std::launch::async, [&, end] {
      return direct_optimize(landscape, theta_start, end, cfg, opt, geometry);
    }));
  }
  EndpointSearchResult out;
  std::string last_error;
  ErrorCode last_code = ErrorCode::kOptimizationDiverged;
  int best = -1;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    EndpointCandidateResult cand;
    cand.endpoint = candidate_endpoints[i];
    cand.objective = std::numeric_limits<double>::infinity();
    try {
      DirectOptResult r = runs[i].get();
      cand.objective = r.objective;
      cand.ok = true;
      if (best < 0 || r.objective < out.best.objective) {
        best = static_cast<int>(i);
        out.best = std::move(r);
      }
    } catch (const Error& err) {
      cand.error = err.what();
      last_error = err.what();
      last_code = err.code();
    }
    out.candidates.push_back(std::move(cand));
  }
  if (best < 0) throw Error(last_code, last_error);
  out.best_endpoint = out.best.trajectory.states.back();
  return out;
}

ELResidualReport el_residual(const Trajectory& traj, const Landscape& landscape, const ObjectiveConfig& cfg,
                             const GeometrySpec* geometry) {
  cfg.validate();
  traj.validate();
  if (traj.segments() < 2) throw_error(ErrorCode::kInvalidInput, "el_residual: need N >= 2");
  const int d = landscape.dim();
  if (traj.dim() != d) throw_error(ErrorCode::kInvalidInput, "el_residual: trajectory dimension mismatch");
  if (geometry) geometry->validate(d);
  const double h = traj.dt();

  Matrix velocity_op, drift_op, g_metric;
  if (geometry) {
    g_metric = geometry->metric;
    const Matrix& a = geometry->drift_matrix;
    velocity_op = g_metric * a + cfg.gamma * g_metric - a.transpose() * g_metric;
    drift_op = cfg.gamma * g_metric - a.transpose() * g_metric;
  }

  ELResidualReport rep;
  rep.grid_step = h;
  for (int j = 1; j < traj.segments(); ++j) {
    const Vector& prev = traj.states[j - 1];
    const Vector& cur = traj.states[j];
    const Vector& next = traj.states[j + 1];
    const Vector vel = (next - prev) / (2.0 * h);
    const Vector acc = (next - 2.0 * cur + prev) / (h * h);
    const Vector force = cfg.eta * cfg.k * landscape.eval(cur).gradient;
    Vector r;
    if (geometry) {
      r = g_metric * acc - velocity_op * vel + drift_op * geometry->drift(cur) - force;
    } else {
      r = acc - cfg.gamma * vel - force;
    }
    rep.max_norm = std::max(rep.max_norm, r.norm());
    rep.residuals.push_back(std::move(r));
  }
  return rep;
}

Trajectory ballistic_1d_integrate(const DoubleWell1D& landscape, double theta0, const ObjectiveConfig& cfg) {
  cfg.validate();
  if (cfg.gamma != 0.0) {
    throw_error(ErrorCode::kInvalidInput, "ballistic_1d_integrate: the zero-energy integral needs gamma = 0");
  }
  if (!std::isfinite(theta0)) throw_error(ErrorCode::kInvalidInput, "ballistic_1d_integrate: non-finite start");
  const double target = landscape.critical_points().plus;
  const double sign = theta0 < target ? 1.0 : -1.0;
  const double h = cfg.dt();
  const double ek2 = 2.0 * cfg.eta * cfg.k;
  auto rhs = [&](double x) { return sign * std::sqrt(ek2 * std::max(0.0, landscape.value_at(x))); };
  const double omega = std::sqrt(cfg.eta * cfg.k * landscape.second_derivative_at(target));

  Trajectory traj;
  std::vector<double> times{0.0};
  traj.states.push_back(Vector::Constant(1, theta0));
  double x = theta0;
  bool tail = false;
  double tail_start = 0.0, tail_offset = 0.0;
  for (int j = 1; j <= cfg.segments; ++j) {
    if (std::abs(x - target) <= 1e-6 && j > 1) break;
    const double t = j * h;
    if (!tail && std::abs(x - target) < 1e-3) {
      tail = true;
      tail_start = (j - 1) * h;
      tail_offset = x - target;
    }
    if (tail) {
      x = target + tail_offset * std::exp(-omega * (t - tail_start));
    } else {
      const double k1 = rhs(x);
      const double k2 = rhs(x + 0.5 * h * k1);
      const double k3 = rhs(x + 0.5 * h * k2);
      const double k4 = rhs(x + h * k3);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if ((target - x) * sign < 0.0) x = target;
    }
    times.push_back(t);
    traj.states.push_back(Vector::Constant(1, x));
  }
  traj.times = Eigen::Map<Vector>(times.data(), static_cast<Eigen::Index>(times.size()));
  return traj;
}

}  // namespace learnpath
