#pragma once

#include <vector>

#include "learnpath/geometry.hpp"
#include "learnpath/landscape.hpp"

namespace learnpath {

struct ObjectiveConfig {
  double eta = 1.0;
  double k = 1.0;
  double gamma = 0.0;
  double horizon = 10.0;
  int segments = 400;

  double dt() const { return horizon / segments; }
  void validate() const;
};

struct Trajectory {
  Vector times;
  std::vector<Vector> states;

  // Uniform grid t_j = j·T/N, j = 0..N, with empty states.
  static Trajectory grid(double horizon, int segments);
  static Trajectory straight_line(const Vector& from, const Vector& to, double horizon, int segments);

  int segments() const { return static_cast<int>(states.size()) - 1; }
  int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  double dt() const;

  // Uniform, increasing times; one state per time; shared dimension.
  void validate() const;
};

struct EnergyProfile {
  std::vector<double> kinetic;    // per segment, ½ uᵀGu / η
  std::vector<double> potential;  // per node, k L(θ)
};

struct ObjectiveValue {
  double value = 0.0;
  EnergyProfile profile;
};

// Discretized discounted objective on the trajectory's own grid: forward
// differences, left-node evaluation, and a potential-only final node.
// cfg supplies η, k, γ; the grid comes from the trajectory.
ObjectiveValue eval_objective(const Trajectory& traj, const Landscape& landscape, const ObjectiveConfig& cfg,
                              const GeometrySpec* geometry = nullptr);

// ∂J/∂θ_j for every node j = 0..N.
std::vector<Vector> objective_gradient_all(const Trajectory& traj, const Landscape& landscape,
                                           const ObjectiveConfig& cfg, const GeometrySpec* geometry = nullptr);

// ∂J/∂θ_j for interior nodes j = 1..N−1.
std::vector<Vector> objective_gradient(const Trajectory& traj, const Landscape& landscape,
                                       const ObjectiveConfig& cfg, const GeometrySpec* geometry = nullptr);

// Sum with Neumaier compensation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace learnpath
