#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "learnpath/dataset.hpp"
#include "learnpath/mlp.hpp"
#include "learnpath/types.hpp"

namespace learnpath {

enum class OptimizerKind { kSgd, kAdam, kBallistic };
const char* optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(const std::string& name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kBallistic;
  double learning_rate = 1e-3;
  double beta1 = 0.9;    // adam only
  double beta2 = 0.999;
  double eps = 1e-8;     // added to √v
  bool bias_correction = true;  // adam only
  std::uint64_t seed = 0;

  void validate() const;
};

// Moment buffers start at zero.
struct OptimizerState {
  Vector m, v;
  std::int64_t t = 0;

  static OptimizerState zeros(int dim);
};

// v ← β₂v + (1−β₂)g², θ ← θ − ηg/(√v + ε)
void ballistic_step(Vector& theta, const Vector& g, Vector& v, const OptimizerConfig& cfg);
void sgd_step(Vector& theta, const Vector& g, const OptimizerConfig& cfg);
void adam_step(Vector& theta, const Vector& g, OptimizerState& state, const OptimizerConfig& cfg);

// Dispatches on cfg.kind.
void optimizer_step(Vector& theta, const Vector& g, OptimizerState& state, const OptimizerConfig& cfg);

struct TrainConfig {
  int epochs = 5;
  int batch_size = 64;
  std::int64_t max_steps = -1;  // < 0: no cap beyond epochs
  int eval_every = 10;
  std::uint64_t seed = 0;       // shuffle order

  void validate() const;
};

struct TrainCurvePoint {
  std::int64_t step;
  double train_loss;     // full training set
  double test_loss;
  double test_accuracy;  // NaN for regression
};

struct TrainResult {
  std::vector<TrainCurvePoint> curve;
  Vector params;
};

// Mini-batch training from init_params(spec). Raises DivergedTraining on a
// non-finite batch loss.
TrainResult train(const MlpSpec& spec, const Dataset& train_set, const Dataset& test_set,
                  const OptimizerConfig& opt, const TrainConfig& cfg);

// Per-direction linear convergence rates of a full-batch linear least-squares
// run: fits log|w_i − w*_i| against step over the window where the error is
// between lo and hi times its initial value.
struct RateReport {
  Vector rates;
  Vector weights;
  Vector optimum;
};
RateReport linear_regression_rates(const Dataset& data, const OptimizerConfig& opt, std::int64_t steps,
                                   double lo = 1e-6, double hi = 1e-1);

}  // namespace learnpath
