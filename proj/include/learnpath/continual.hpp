#pragma once

#include <cstdint>
#include <vector>

#include "learnpath/landscape.hpp"
#include "learnpath/objective.hpp"
#include "learnpath/types.hpp"

namespace learnpath {

// Per-coordinate Gaussian N(μ_i, v_i) over parameters. mu0 is the expansion
// point of the local quadratic loss model.
struct DistributionalState {
  Vector mu, v, mu_dot, v_dot, mu0;
  std::uint64_t floor_hits = 0;

  // Zero velocities, mu0 = mu.
  static DistributionalState initial(const Vector& mu, const Vector& v);
  int dim() const { return static_cast<int>(mu.size()); }
  void validate() const;
};

struct TaskSegment {
  QuadraticLoss loss;
  double duration;
};

struct TaskSchedule {
  std::vector<TaskSegment> segments;

  void validate(int dim) const;
  double total_duration() const;
};

struct KLRate {
  double exact;      // KL(p || q)
  double quadratic;  // Σ (½ μ̇²/v + ¼ v̇²/v²) Δt², v taken from q
};
KLRate kl_rate(const Vector& mu1, const Vector& v1, const Vector& mu0, const Vector& v0, double dt);

// μ̈ and v̈ of the distributional EL system.
struct DistributionalAcceleration {
  Vector mu, v;
};
DistributionalAcceleration distributional_acceleration(const DistributionalState& s, const QuadraticLoss& loss,
                                                       const ObjectiveConfig& cfg);

// One RK4 step of the coupled second-order system.
DistributionalState el_step(const DistributionalState& state, const QuadraticLoss& loss, const ObjectiveConfig& cfg,
                            double dt);

// Explicit Euler step of the large-γ first-order limit. Velocities are set to
// the rates used for the step.
DistributionalState overdamped_step(const DistributionalState& state, const QuadraticLoss& loss,
                                    const ObjectiveConfig& cfg, double dt);

// Places μ̇ and v̇ on the decaying branch of the linearized system.
void project_stable_velocities(DistributionalState& s, const QuadraticLoss& loss, const ObjectiveConfig& cfg);

inline constexpr double kContinualVarianceFloor = 1e-12;

enum class ContinualMode { kFull, kOverdamped };

struct DistributionalTrace {
  std::vector<double> times;
  std::vector<int> segment;
  std::vector<DistributionalState> states;
};

// Integrates across segments, resetting mu0 to μ at each boundary. Velocities
// carry over. Records every record_every steps plus each segment's last state.
DistributionalTrace run_schedule(const DistributionalState& initial, const TaskSchedule& schedule,
                                 const ObjectiveConfig& cfg, double dt, ContinualMode mode, int record_every = 1);

}  // namespace learnpath
