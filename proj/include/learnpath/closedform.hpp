#pragma once

#include <functional>
#include <optional>
#include <string>

#include "learnpath/geometry.hpp"
#include "learnpath/landscape.hpp"
#include "learnpath/objective.hpp"

namespace learnpath {

// θ_t = θ∞ + e^{Rt}(θ0 − θ∞) with θ∞ = B(θ0 − H⁻¹g). Only the decaying root is kept.
struct SpectralSolution {
  Matrix rates;
  Matrix bias;
  Vector target;
  Vector base;

  Vector at(double t) const;
};

enum class RuleRegime { kNewton, kGradientDescent, kBallistic, kNaturalGradient, kNaturalBallistic };

const char* regime_name(RuleRegime regime);
std::optional<RuleRegime> parse_regime(const std::string& name);

SpectralSolution momentum_spectral(const QuadraticLoss& loss, const ObjectiveConfig& cfg);
Vector momentum_solution(const QuadraticLoss& loss, const ObjectiveConfig& cfg, double t);

// Metric version: every function of H becomes the same function of G⁻¹H.
SpectralSolution natural_momentum_spectral(const QuadraticLoss& loss, const ObjectiveConfig& cfg, const Matrix& g);
Vector natural_momentum_solution(const QuadraticLoss& loss, const ObjectiveConfig& cfg, const Matrix& g, double t);

// Single update of length dt under one of the limiting regimes. Natural
// regimes require `metric`; passing a metric to newton or gradient_descent
// selects their metric versions.
Vector limit_rule(RuleRegime regime, const QuadraticLoss& loss, const ObjectiveConfig& cfg, double dt,
                  const Matrix* metric = nullptr);

// Isotropic loss L = gᵀ(θ−θ0) + h/2 |θ−θ0|² with rotational drift f(θ) = Jθ, J skew.
SpectralSolution rotation_drift_spectral(const Matrix& j_skew, double h, const Vector& g, const Vector& theta0,
                                         const ObjectiveConfig& cfg);
Vector rotation_drift_solution(const Matrix& j_skew, double h, const Vector& g, const Vector& theta0,
                               const ObjectiveConfig& cfg, double t);

// Per-eigendirection rates rᵢ = γ/2 − √(γ²/4 + (j−γ)j + ηkλᵢ) and biases
// bᵢ = ηkλᵢ / (ηkλᵢ + (j−γ)j). These solve the EL equation
// θ̈ − γθ̇ = (j−γ)jθ + ηk∇L, i.e. the drift term enters through (j−γ)jθ.
SpectralSolution weight_decay_spectral(double j, const QuadraticLoss& loss, const ObjectiveConfig& cfg);
Vector weight_decay_drift_solution(double j, const QuadraticLoss& loss, const ObjectiveConfig& cfg, double t);

double quad_1d_rate(double h, const ObjectiveConfig& cfg);
double quad_1d_solution(double theta0, double theta_star, double h, const ObjectiveConfig& cfg, double t);

struct DriftField {
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;  // optional; central differences otherwise
};

struct NongradientReport {
  Matrix jacobian;
  bool is_gradient_field = false;
  Matrix gamma_eff;  // γI + J − Jᵀ
};

NongradientReport nongradient_diagnostic(const DriftField& field, const Vector& theta, double gamma);

// Samples θ(t) on the uniform grid of (horizon, segments).
Trajectory sample_trajectory(const std::function<Vector(double)>& path, double horizon, int segments);

}  // namespace learnpath
