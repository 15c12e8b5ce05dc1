#pragma once

#include "learnpath/types.hpp"

namespace learnpath {

// Constant SPD metric G and affine drift f(θ) = Aθ + b (Jacobian A).
struct GeometrySpec {
  Matrix metric;
  Matrix drift_matrix;
  Vector drift_offset;

  static GeometrySpec identity(int dim);
  static GeometrySpec with_metric(const Matrix& g);
  // f(θ) = Aθ
  static GeometrySpec with_drift(const Matrix& a);

  int dim() const { return static_cast<int>(metric.rows()); }
  Vector drift(const Vector& theta) const { return drift_matrix * theta + drift_offset; }
  bool has_drift() const;

  // Shapes agree and G is SPD; throws InvalidInput / SingularMatrix otherwise.
  void validate(int expected_dim) const;
};

}  // namespace learnpath
