#pragma once

#include <optional>
#include <string>
#include <vector>

#include "learnpath/objective.hpp"

namespace learnpath {

enum class EndpointPolicy { kFixed, kSearched };

struct DirectOptConfig {
  int max_iters = 20000;
  double step_size = 1.0;          // first trial step of each line search
  double convergence_tol = 1e-6;   // on the preconditioned gradient, max-abs
  EndpointPolicy endpoint_policy = EndpointPolicy::kFixed;
  int divergence_patience = 50;

  void validate() const;
};

struct DirectOptResult {
  Trajectory trajectory;
  double objective = 0.0;
  double step_norm = 0.0;  // max-abs of the last preconditioned gradient
  int iterations = 0;
  bool converged = false;
};

// Minimizes the discretized objective over the free nodes, starting from the
// straight line between the endpoints on the grid (cfg.horizon, cfg.segments).
// The start node is always fixed; the end node is free under kSearched.
// Each iteration solves with an SPD block-tridiagonal model of the objective
// Hessian (exact kinetic part, loss Hessian projected onto PSD) and then
// backtracks by halving until the Armijo condition holds.
DirectOptResult direct_optimize(const Landscape& landscape, const Vector& theta_start, const Vector& theta_end,
                                const ObjectiveConfig& cfg, const DirectOptConfig& opt,
                                const GeometrySpec* geometry = nullptr);

struct EndpointCandidateResult {
  Vector endpoint;
  double objective = 0.0;  // +inf when the run failed
  bool ok = false;
  std::string error;
};

struct EndpointSearchResult {
  Vector best_endpoint;
  DirectOptResult best;
  std::vector<EndpointCandidateResult> candidates;
};

// One direct_optimize per candidate (run concurrently). Failed candidates are
// recorded and skipped; if every candidate fails the last error is rethrown.
EndpointSearchResult endpoint_search(const Landscape& landscape, const Vector& theta_start,
                                     const std::vector<Vector>& candidate_endpoints, const ObjectiveConfig& cfg,
                                     const DirectOptConfig& opt, const GeometrySpec* geometry = nullptr);

struct ELResidualReport {
  std::vector<Vector> residuals;  // interior nodes 1..N−1
  double max_norm = 0.0;
  double grid_step = 0.0;
};

// Central-difference residual of
//   Gθ̈ − (GA + γG − AᵀG)θ̇ + (γG − AᵀG) f − ηk∇L
// with f = Aθ + b; reduces to θ̈ − γθ̇ − ηk∇L without geometry.
ELResidualReport el_residual(const Trajectory& traj, const Landscape& landscape, const ObjectiveConfig& cfg,
                             const GeometrySpec* geometry = nullptr);

// Zero-energy first integral θ̇ = ±√(2ηkL(θ)) on the grid of cfg, heading for θ₊.
// Stops early once |θ − θ₊| ≤ 1e-6.
Trajectory ballistic_1d_integrate(const DoubleWell1D& landscape, double theta0, const ObjectiveConfig& cfg);

}  // namespace learnpath
