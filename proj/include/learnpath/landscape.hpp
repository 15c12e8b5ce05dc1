#pragma once

#include <memory>
#include <string>
#include <vector>

#include "learnpath/types.hpp"

namespace learnpath {

struct LossEval {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

class Landscape {
 public:
  virtual ~Landscape() = default;
  virtual int dim() const = 0;
  virtual LossEval eval(const Vector& theta) const = 0;
  virtual double value(const Vector& theta) const { return eval(theta).value; }
  virtual std::string kind() const = 0;

 protected:
  void check_dim(const Vector& theta) const;
};

using LandscapePtr = std::shared_ptr<const Landscape>;

// L(θ) = L0 + gᵀ(θ−θ0) + ½(θ−θ0)ᵀH(θ−θ0)
class QuadraticLoss final : public Landscape {
 public:
  QuadraticLoss(Vector base_point, double base_value, Vector gradient, Matrix hessian);

  int dim() const override { return static_cast<int>(base_point_.size()); }
  LossEval eval(const Vector& theta) const override;
  std::string kind() const override { return "quadratic"; }

  const Vector& base_point() const { return base_point_; }
  double base_value() const { return base_value_; }
  const Vector& gradient() const { return gradient_; }
  const Matrix& hessian() const { return hessian_; }

  // θ0 − H⁻¹g, requires SPD H.
  Vector minimizer() const;

 private:
  Vector base_point_;
  double base_value_;
  Vector gradient_;
  Matrix hessian_;
};

// L(θ1, θ2) = a(θ1² − b)² + cθ2² + dθ1
class DoubleWell2D final : public Landscape {
 public:
  DoubleWell2D(double a, double b, double c, double d);

  int dim() const override { return 2; }
  LossEval eval(const Vector& theta) const override;
  std::string kind() const override { return "double_well_2d"; }

  // Stationary points along θ2 = 0 that are minima, sorted by loss (deepest first).
  std::vector<Vector> minima() const;

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }

 private:
  double a_, b_, c_, d_;
};

struct CriticalPoints1D {
  double minus;  // θ₋, the shallow well
  double zero;   // local maximum at 0
  double plus;   // θ₊, the global minimum
};

// L(θ) = h/4 (θ² − θ*²)² − q/3 θ³ − L_min, with L(θ₊) = 0.
class DoubleWell1D final : public Landscape {
 public:
  DoubleWell1D(double h, double q, double theta_star);

  int dim() const override { return 1; }
  LossEval eval(const Vector& theta) const override;
  std::string kind() const override { return "double_well_1d"; }

  double value_at(double theta) const;
  double derivative_at(double theta) const;
  double second_derivative_at(double theta) const;

  CriticalPoints1D critical_points() const;
  double h() const { return h_; }
  double q() const { return q_; }
  double theta_star() const { return theta_star_; }
  double offset() const { return l_min_; }

 private:
  double raw_value(double theta) const;

  double h_, q_, theta_star_;
  double l_min_ = 0.0;
};

struct FiniteDiffReport {
  double grad_error = 0.0;
  double hess_error = 0.0;
};

// Max abs gap between the analytic derivatives and central differences.
FiniteDiffReport finite_diff_check(const Landscape& landscape, const Vector& theta, double step);

// Diagonal quadratic with minimum at the origin of value zero.
std::shared_ptr<QuadraticLoss> make_diagonal_quadratic(const Vector& curvatures);

}  // namespace learnpath
