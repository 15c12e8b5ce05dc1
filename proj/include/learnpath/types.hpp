#pragma once

#include <Eigen/Dense>

namespace learnpath {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace learnpath
