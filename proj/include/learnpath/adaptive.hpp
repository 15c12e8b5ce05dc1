#pragma once

#include <cstdint>
#include <vector>

#include "learnpath/types.hpp"

namespace learnpath {

struct AdaptiveParams {
  double eta = 1.0;
  double k = 1.0;
  double gamma = 1.0;
  double kappa = 2.0;  // 2τ²/σ² for τ = σ = 1
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double xi1 = 0.03;
  double xi2 = 0.03;
  double sigma1 = 1.0;
  double sigma2 = 1.0;

  void validate() const;
};

// Diagonal belief state. theta0 is the expansion point of the local loss model.
struct BeliefState {
  Vector theta, theta0, m, v;
  Vector theta_dot, m_dot, v_dot;
  std::uint64_t floor_hits = 0;

  // θ = θ0 = theta, m = first gradient, v = 1, velocities zero.
  static BeliefState initial(const Vector& theta, const Vector& first_gradient);
  int dim() const { return static_cast<int>(theta.size()); }
  void validate() const;
};

inline constexpr double kVarianceFloor = 1e-12;

enum class ObservationModel { kFull, kSimplified };

// One RK4 step of the second-order EL system (θ, m, v) with g_obs held fixed.
BeliefState el_step_full(const BeliefState& state, const Vector& g_obs, const AdaptiveParams& p, double dt);
BeliefState el_step_simplified(const BeliefState& state, const Vector& g_obs, const AdaptiveParams& p, double dt);

// Accelerations (θ̈, m̈, v̈) of the EL system at a state.
struct BeliefAcceleration {
  Vector theta, m, v;
};
BeliefAcceleration belief_acceleration(ObservationModel model, const BeliefState& s, const Vector& g_obs,
                                       const AdaptiveParams& p);

// Sets each velocity to the decaying branch of its row's linearization about the
// current state: ẋ = −F / (γ/2 + √(γ²/4 + K)), F the row's force at zero
// velocity and K its stiffness.
void project_stable_velocities(ObservationModel model, BeliefState& s, const Vector& g_obs,
                               const AdaptiveParams& p);

// First-order belief updates plus the ballistic θ update, with V scaled by κ.
BeliefState reduced_step(const BeliefState& state, const Vector& g_obs, const AdaptiveParams& p, double dt);

// −√(ηk) V^{-1/2} m Δt
Vector adaptive_rule(const Vector& m, const Vector& v, double eta, double k, double dt);

// Drives a belief trajectory against a gradient oracle for n steps. Each step
// re-anchors θ0 at the current θ; second-order models project velocities onto
// the stable branch before integrating.
enum class BeliefDriver { kFull, kSimplified, kReduced };
struct BeliefTrace {
  std::vector<double> times;
  std::vector<BeliefState> states;
};
template <typename GradientFn>
BeliefTrace drive_beliefs(BeliefDriver driver, BeliefState state, GradientFn&& gradient, const AdaptiveParams& p,
                          double dt, int steps, int record_every = 1);

struct OUProbeParams {
  double tau = 1.0;
  double sigma = 1.0;
  Matrix hessian;
  Vector gradient;
  Vector theta0;
  std::int64_t n_steps = 1000000;
  double dt = 0.01;
  std::uint64_t seed = 1;
};

struct OUProbeResult {
  Matrix empirical;           // mean of ∇L∇Lᵀ after burn-in
  Matrix predicted;           // (σ²/(2τ²)) H
  Matrix predicted_stationary;  // exact SDE stationary value (σ²τ/2) H
  Matrix predicted_discrete;    // exact for the Euler–Maruyama chain
  double relative_error = 0.0;  // ‖empirical − predicted‖_F / ‖predicted‖_F
  std::int64_t samples = 0;
};

OUProbeResult ou_probe(const OUProbeParams& params);

// ---- implementation of the template driver ----

BeliefState driver_step(BeliefDriver driver, const BeliefState& state, const Vector& g_obs, const AdaptiveParams& p,
                        double dt);

template <typename GradientFn>
BeliefTrace drive_beliefs(BeliefDriver driver, BeliefState state, GradientFn&& gradient, const AdaptiveParams& p,
                          double dt, int steps, int record_every) {
  BeliefTrace trace;
  trace.times.push_back(0.0);
  trace.states.push_back(state);
  for (int i = 1; i <= steps; ++i) {
    const Vector g = gradient(state.theta);
    state = driver_step(driver, state, g, p, dt);
    if (i % record_every == 0 || i == steps) {
      trace.times.push_back(i * dt);
      trace.states.push_back(state);
    }
  }
  return trace;
}

}  // namespace learnpath
