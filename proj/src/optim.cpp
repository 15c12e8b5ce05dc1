#include "learnpath/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "learnpath/error.hpp"
#include "learnpath/matfun.hpp"

namespace learnpath {
namespace {

void check_shapes(const Vector& theta, const Vector& g, const char* what) {
  if (theta.size() != g.size()) {
    std::ostringstream msg;
    msg << what << ": parameter size " << theta.size() << " differs from gradient size " << g.size();
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
}

}  // namespace

const char* optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kSgd: return "sgd";
    case OptimizerKind::kAdam: return "adam";
    case OptimizerKind::kBallistic: return "ballistic";
  }
  return "unknown";
}

OptimizerKind parse_optimizer(const std::string& name) {
  for (auto k : {OptimizerKind::kSgd, OptimizerKind::kAdam, OptimizerKind::kBallistic}) {
    if (name == optimizer_name(k)) return k;
  }
  throw_error(ErrorCode::kInvalidInput, "unknown optimizer '" + name + "'");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw_error(ErrorCode::kInvalidInput, "OptimizerConfig: learning_rate must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw_error(ErrorCode::kInvalidInput, "OptimizerConfig: beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw_error(ErrorCode::kInvalidInput, "OptimizerConfig: beta2 must lie in [0, 1)");
  if (!(eps > 0.0)) throw_error(ErrorCode::kInvalidInput, "OptimizerConfig: eps must be positive");
}

OptimizerState OptimizerState::zeros(int dim) {
  return {Vector::Zero(dim), Vector::Zero(dim), 0};
}

void ballistic_step(Vector& theta, const Vector& g, Vector& v, const OptimizerConfig& cfg) {
  check_shapes(theta, g, "ballistic_step");
  check_shapes(v, g, "ballistic_step");
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseAbs2();
  theta.array() -= cfg.learning_rate * g.array() / (v.array().sqrt() + cfg.eps);
}

void sgd_step(Vector& theta, const Vector& g, const OptimizerConfig& cfg) {
  check_shapes(theta, g, "sgd_step");
  theta -= cfg.learning_rate * g;
}

void adam_step(Vector& theta, const Vector& g, OptimizerState& state, const OptimizerConfig& cfg) {
  check_shapes(theta, g, "adam_step");
  check_shapes(state.m, g, "adam_step");
  check_shapes(state.v, g, "adam_step");
  ++state.t;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * g.cwiseAbs2();
  double c1 = 1.0, c2 = 1.0;
  if (cfg.bias_correction) {
    c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  }
  theta.array() -= cfg.learning_rate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.eps);
}

void optimizer_step(Vector& theta, const Vector& g, OptimizerState& state, const OptimizerConfig& cfg) {
  switch (cfg.kind) {
    case OptimizerKind::kSgd:
      sgd_step(theta, g, cfg);
      ++state.t;
      return;
    case OptimizerKind::kAdam:
      adam_step(theta, g, state, cfg);
      return;
    case OptimizerKind::kBallistic:
      ballistic_step(theta, g, state.v, cfg);
      ++state.t;
      return;
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw_error(ErrorCode::kInvalidInput, "TrainConfig: epochs must be >= 1");
  if (batch_size < 1) throw_error(ErrorCode::kInvalidInput, "TrainConfig: batch_size must be >= 1");
  if (eval_every < 1) throw_error(ErrorCode::kInvalidInput, "TrainConfig: eval_every must be >= 1");
}

TrainResult train(const MlpSpec& spec, const Dataset& train_set, const Dataset& test_set, const OptimizerConfig& opt,
                  const TrainConfig& cfg) {
  spec.validate();
  opt.validate();
  cfg.validate();
  train_set.validate();
  test_set.validate();
  if (train_set.size() == 0) throw_error(ErrorCode::kInvalidInput, "train: empty training set");

  TrainResult result;
  result.params = init_params(spec);
  OptimizerState state = OptimizerState::zeros(spec.param_count());
  std::mt19937_64 rng(cfg.seed);
  std::vector<int> order(static_cast<std::size_t>(train_set.size()));
  std::iota(order.begin(), order.end(), 0);

  auto record = [&](std::int64_t step) {
    TrainCurvePoint p{step, mlp_loss(spec, result.params, train_set), std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN()};
    if (test_set.size() > 0) {
      p.test_loss = mlp_loss(spec, result.params, test_set);
      if (!test_set.is_regression()) p.test_accuracy = mlp_accuracy(spec, result.params, test_set);
    }
    result.curve.push_back(p);
  };

  record(0);
  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      if (cfg.max_steps >= 0 && step >= cfg.max_steps) break;
      const auto stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const Dataset batch = train_set.subset(std::vector<int>(order.begin() + start, order.begin() + stop));
      const LossAndGrad lg = mlp_forward_backward(spec, result.params, batch);
      if (!std::isfinite(lg.loss) || !lg.gradient.allFinite()) {
        std::ostringstream msg;
        msg << "train: non-finite loss at step " << step << " (" << optimizer_name(opt.kind) << ")";
        throw_error(ErrorCode::kDivergedTraining, msg.str());
      }
      optimizer_step(result.params, lg.gradient, state, opt);
      ++step;
      if (step % cfg.eval_every == 0) record(step);
    }
  }
  if (result.curve.back().step != step) record(step);
  return result;
}

RateReport linear_regression_rates(const Dataset& data, const OptimizerConfig& opt, std::int64_t steps, double lo,
                                   double hi) {
  data.validate();
  opt.validate();
  if (!data.is_regression() || data.targets.cols() != 1) {
    throw_error(ErrorCode::kInvalidInput, "linear_regression_rates: needs a single-target regression set");
  }
  if (!(lo > 0.0 && lo < hi)) throw_error(ErrorCode::kInvalidInput, "linear_regression_rates: need 0 < lo < hi");
  const Matrix& x = data.inputs;
  const Vector y = data.targets.col(0);
  const double n = static_cast<double>(x.rows());
  const Matrix hessian = x.transpose() * x / n;
  const Vector optimum = hessian.ldlt().solve(x.transpose() * y / n);
  // directions are the eigenvectors of the empirical curvature, sorted ascending
  const auto eig = matfun::sym_eig(hessian);

  const Eigen::Index d = x.cols();
  Vector w = Vector::Zero(d);
  OptimizerState state = OptimizerState::zeros(static_cast<int>(d));
  const Vector e0 = (eig.eigenvectors.transpose() * (w - optimum)).cwiseAbs();
  std::vector<std::vector<std::pair<double, double>>> samples(static_cast<std::size_t>(d));
  for (std::int64_t s = 1; s <= steps; ++s) {
    const Vector g = x.transpose() * (x * w - y) / n;
    optimizer_step(w, g, state, opt);
    if (!w.allFinite()) throw_error(ErrorCode::kDivergedTraining, "linear_regression_rates: iterate diverged");
    const Vector e = (eig.eigenvectors.transpose() * (w - optimum)).cwiseAbs();
    for (Eigen::Index i = 0; i < d; ++i) {
      if (e(i) <= hi * e0(i) && e(i) >= lo * e0(i)) {
        samples[static_cast<std::size_t>(i)].emplace_back(static_cast<double>(s), std::log(e(i)));
      }
    }
  }

  RateReport report{Vector::Constant(d, std::numeric_limits<double>::quiet_NaN()), w, optimum};
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& pts = samples[static_cast<std::size_t>(i)];
    if (pts.size() < 3) continue;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [a, b] : pts) {
      sx += a;
      sy += b;
      sxx += a * a;
      sxy += a * b;
    }
    const double m = static_cast<double>(pts.size());
    report.rates(i) = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return report;
}

}  // namespace learnpath
