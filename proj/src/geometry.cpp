#include "learnpath/geometry.hpp"

#include <sstream>

#include "learnpath/error.hpp"
#include "learnpath/matfun.hpp"

namespace learnpath {

GeometrySpec GeometrySpec::identity(int dim) {
  return {Matrix::Identity(dim, dim), Matrix::Zero(dim, dim), Vector::Zero(dim)};
}

GeometrySpec GeometrySpec::with_metric(const Matrix& g) {
  const auto n = g.rows();
  return {g, Matrix::Zero(n, n), Vector::Zero(n)};
}

GeometrySpec GeometrySpec::with_drift(const Matrix& a) {
  const auto n = a.rows();
  return {Matrix::Identity(n, n), a, Vector::Zero(n)};
}

bool GeometrySpec::has_drift() const {
  return drift_matrix.cwiseAbs().maxCoeff() > 0.0 || drift_offset.cwiseAbs().maxCoeff() > 0.0;
}

void GeometrySpec::validate(int expected_dim) const {
  const auto n = metric.rows();
  if (n != expected_dim || metric.cols() != n || drift_matrix.rows() != n || drift_matrix.cols() != n ||
      drift_offset.size() != n) {
    std::ostringstream msg;
    msg << "geometry: expected dimension " << expected_dim << ", got metric " << metric.rows() << "x"
        << metric.cols() << ", drift " << drift_matrix.rows() << "x" << drift_matrix.cols() << " + "
        << drift_offset.size();
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
  if (!drift_matrix.allFinite() || !drift_offset.allFinite()) {
    throw_error(ErrorCode::kInvalidInput, "geometry: non-finite drift coefficient");
  }
  matfun::check_spd(matfun::sym_eig(metric), "geometry metric");
}

}  // namespace learnpath
