#include "learnpath/closedform.hpp"

#include <cmath>
#include <sstream>

#include "learnpath/error.hpp"
#include "learnpath/matfun.hpp"

namespace learnpath {

Vector SpectralSolution::at(double t) const {
  if (!(t >= 0.0)) throw_error(ErrorCode::kInvalidInput, "closed form: time must be non-negative");
  return target + matfun::mat_exp(rates, t) * (base - target);
}

const char* regime_name(RuleRegime regime) {
  switch (regime) {
    case RuleRegime::kNewton:
      return "newton";
    case RuleRegime::kGradientDescent:
      return "gradient_descent";
    case RuleRegime::kBallistic:
      return "ballistic";
    case RuleRegime::kNaturalGradient:
      return "natural_gradient";
    case RuleRegime::kNaturalBallistic:
      return "natural_ballistic";
  }
  return "unknown";
}

std::optional<RuleRegime> parse_regime(const std::string& name) {
  for (auto r : {RuleRegime::kNewton, RuleRegime::kGradientDescent, RuleRegime::kBallistic,
                 RuleRegime::kNaturalGradient, RuleRegime::kNaturalBallistic}) {
    if (name == regime_name(r)) return r;
  }
  return std::nullopt;
}

namespace {

double stable_root(double gamma, double stiffness) {
  const double radicand = 0.25 * gamma * gamma + stiffness;
  return 0.5 * gamma - std::sqrt(radicand);
}

}  // namespace

SpectralSolution momentum_spectral(const QuadraticLoss& loss, const ObjectiveConfig& cfg) {
  cfg.validate();
  const matfun::SymEig e = matfun::sym_eig(loss.hessian());
  matfun::check_spd(e, "momentum_solution (Hessian)");
  const double ek = cfg.eta * cfg.k;
  const double gamma = cfg.gamma;
  SpectralSolution s;
  s.rates = matfun::sym_function(e, [&](double x) { return stable_root(gamma, ek * x); });
  const auto n = loss.dim();
  s.bias = Matrix::Identity(n, n);
  s.base = loss.base_point();
  s.target = s.base - matfun::sym_function(e, [](double x) { return 1.0 / x; }) * loss.gradient();
  return s;
}

Vector momentum_solution(const QuadraticLoss& loss, const ObjectiveConfig& cfg, double t) {
  return momentum_spectral(loss, cfg).at(t);
}

SpectralSolution natural_momentum_spectral(const QuadraticLoss& loss, const ObjectiveConfig& cfg, const Matrix& g) {
  cfg.validate();
  if (g.rows() != loss.dim() || g.cols() != loss.dim()) {
    throw_error(ErrorCode::kInvalidInput, "natural_momentum_solution: metric dimension mismatch");
  }
  const matfun::SymEig he = matfun::sym_eig(loss.hessian());
  matfun::check_spd(he, "natural_momentum_solution (Hessian)");
  // SPD check of G⁻¹H happens through its symmetric similarity transform
  matfun::pair_sqrt(g, loss.hessian());
  const double ek = cfg.eta * cfg.k;
  const double gamma = cfg.gamma;
  SpectralSolution s;
  s.rates = matfun::pair_function(g, loss.hessian(), [&](double x) { return stable_root(gamma, ek * x); });
  const auto n = loss.dim();
  s.bias = Matrix::Identity(n, n);
  s.base = loss.base_point();
  s.target = s.base - matfun::sym_function(he, [](double x) { return 1.0 / x; }) * loss.gradient();
  return s;
}

Vector natural_momentum_solution(const QuadraticLoss& loss, const ObjectiveConfig& cfg, const Matrix& g,
                                 double t) {
  return natural_momentum_spectral(loss, cfg, g).at(t);
}

Vector limit_rule(RuleRegime regime, const QuadraticLoss& loss, const ObjectiveConfig& cfg, double dt,
                  const Matrix* metric) {
  cfg.validate();
  if (!(dt > 0.0)) throw_error(ErrorCode::kInvalidInput, "limit_rule: dt must be positive");
  const double ek = cfg.eta * cfg.k;
  const Vector& g = loss.gradient();
  const bool natural = regime == RuleRegime::kNaturalGradient || regime == RuleRegime::kNaturalBallistic;
  if (natural && metric == nullptr) {
    throw_error(ErrorCode::kInvalidInput, std::string("limit_rule: regime ") + regime_name(regime) + " needs a metric");
  }
  if (metric && (metric->rows() != loss.dim() || metric->cols() != loss.dim())) {
    throw_error(ErrorCode::kInvalidInput, "limit_rule: metric dimension mismatch");
  }
  switch (regime) {
    case RuleRegime::kNewton: {
      const SpectralSolution s =
          metric ? natural_momentum_spectral(loss, cfg, *metric) : momentum_spectral(loss, cfg);
      return s.at(dt) - s.base;
    }
    case RuleRegime::kGradientDescent:
    case RuleRegime::kNaturalGradient: {
      if (cfg.gamma == 0.0) {
        throw_error(ErrorCode::kInvalidInput, "limit_rule: the gradient-descent limit is undefined for gamma = 0");
      }
      const Vector direction = metric ? Vector(matfun::spd_inverse(*metric) * g) : g;
      return -(ek / cfg.gamma) * dt * direction;
    }
    case RuleRegime::kBallistic:
      return -std::sqrt(ek) * dt * (matfun::spd_inv_sqrt(loss.hessian()) * g);
    case RuleRegime::kNaturalBallistic: {
      const Matrix root = matfun::pair_sqrt(*metric, loss.hessian()).value;
      return -std::sqrt(ek) * dt * (root * (matfun::spd_inverse(loss.hessian()) * g));
    }
  }
  throw_error(ErrorCode::kInvalidInput, "limit_rule: unknown regime");
}

SpectralSolution rotation_drift_spectral(const Matrix& j_skew, double h, const Vector& g, const Vector& theta0,
                                         const ObjectiveConfig& cfg) {
  cfg.validate();
  const auto n = theta0.size();
  if (j_skew.rows() != n || j_skew.cols() != n || g.size() != n) {
    throw_error(ErrorCode::kInvalidInput, "rotation_drift_solution: dimension mismatch");
  }
  if (!j_skew.allFinite()) throw_error(ErrorCode::kInvalidInput, "rotation_drift_solution: non-finite generator");
  const double skew_gap = (j_skew + j_skew.transpose()).cwiseAbs().maxCoeff();
  if (skew_gap > 1e-10) {
    std::ostringstream msg;
    msg << "rotation_drift_solution: generator is not skew-symmetric (max |J + Jᵀ| = " << skew_gap << ")";
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
  if (!(h > 0.0)) throw_error(ErrorCode::kInvalidInput, "rotation_drift_solution: curvature h must be positive");
  const double ekh = cfg.eta * cfg.k * h;
  const Matrix id = Matrix::Identity(n, n);
  SpectralSolution s;
  s.rates = j_skew + stable_root(cfg.gamma, ekh) * id;
  const Matrix denom = ekh * id - j_skew * (j_skew + cfg.gamma * id);
  Eigen::FullPivLU<Matrix> lu(denom);
  if (!lu.isInvertible()) throw_error(ErrorCode::kSingularMatrix, "rotation_drift_solution: bias matrix is singular");
  s.bias = ekh * lu.inverse();
  s.base = theta0;
  s.target = s.bias * (theta0 - g / h);
  return s;
}

Vector rotation_drift_solution(const Matrix& j_skew, double h, const Vector& g, const Vector& theta0,
                               const ObjectiveConfig& cfg, double t) {
  return rotation_drift_spectral(j_skew, h, g, theta0, cfg).at(t);
}

SpectralSolution weight_decay_spectral(double j, const QuadraticLoss& loss, const ObjectiveConfig& cfg) {
  cfg.validate();
  if (!(j >= 0.0) || !std::isfinite(j)) throw_error(ErrorCode::kInvalidInput, "weight_decay: j must be >= 0");
  const matfun::SymEig e = matfun::sym_eig(loss.hessian());
  matfun::check_spd(e, "weight_decay (Hessian)");
  const double ek = cfg.eta * cfg.k;
  const double shift = (j - cfg.gamma) * j;
  const auto n = loss.dim();
  Vector rates(n), biases(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = e.eigenvalues(i);
    const double radicand = 0.25 * cfg.gamma * cfg.gamma + shift + ek * lam;
    const double denom = ek * lam + shift;
    if (radicand < 0.0 || denom == 0.0) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "weight_decay: eigenvalue " << lam << " gives " << (radicand < 0.0 ? "a negative radicand " : "a zero bias denominator ")
          << (radicand < 0.0 ? radicand : denom);
      throw_error(ErrorCode::kInvalidInput, msg.str());
    }
    rates(i) = 0.5 * cfg.gamma - std::sqrt(radicand);
    biases(i) = ek * lam / denom;
  }
  SpectralSolution s;
  s.rates = e.eigenvectors * rates.asDiagonal() * e.eigenvectors.transpose();
  s.bias = e.eigenvectors * biases.asDiagonal() * e.eigenvectors.transpose();
  s.base = loss.base_point();
  const Vector newton = s.base - matfun::sym_function(e, [](double x) { return 1.0 / x; }) * loss.gradient();
  s.target = s.bias * newton;
  return s;
}

Vector weight_decay_drift_solution(double j, const QuadraticLoss& loss, const ObjectiveConfig& cfg, double t) {
  return weight_decay_spectral(j, loss, cfg).at(t);
}

double quad_1d_rate(double h, const ObjectiveConfig& cfg) {
  if (!(h > 0.0)) throw_error(ErrorCode::kInvalidInput, "quad_1d_solution: h must be positive");
  return stable_root(cfg.gamma, cfg.eta * cfg.k * h);
}

double quad_1d_solution(double theta0, double theta_star, double h, const ObjectiveConfig& cfg, double t) {
  return theta_star + (theta0 - theta_star) * std::exp(quad_1d_rate(h, cfg) * t);
}

NongradientReport nongradient_diagnostic(const DriftField& field, const Vector& theta, double gamma) {
  NongradientReport rep;
  if (field.jacobian) {
    rep.jacobian = field.jacobian(theta);
  } else {
    if (!field.value) throw_error(ErrorCode::kInvalidInput, "nongradient_diagnostic: drift field is empty");
    const auto n = theta.size();
    rep.jacobian = Matrix(n, n);
    const double step = 1e-6;
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector up = theta, down = theta;
      up(i) += step;
      down(i) -= step;
      rep.jacobian.col(i) = (field.value(up) - field.value(down)) / (2.0 * step);
    }
  }
  const auto n = rep.jacobian.rows();
  const Matrix asym = rep.jacobian - rep.jacobian.transpose();
  rep.is_gradient_field = asym.norm() <= 1e-8;
  rep.gamma_eff = gamma * Matrix::Identity(n, n) + asym;
  return rep;
}

Trajectory sample_trajectory(const std::function<Vector(double)>& path, double horizon, int segments) {
  Trajectory t = Trajectory::grid(horizon, segments);
  t.states.reserve(segments + 1);
  for (int j = 0; j <= segments; ++j) t.states.push_back(path(t.times(j)));
  return t;
}

}  // namespace learnpath
