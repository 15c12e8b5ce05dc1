#pragma once

#include <random>

#include "learnpath/types.hpp"

namespace testsupport {

inline learnpath::Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  learnpath::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

inline learnpath::Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  return scale * random_matrix(rng, n, 1).col(0);
}

inline learnpath::Matrix random_symmetric(std::mt19937_64& rng, int n) {
  const learnpath::Matrix a = random_matrix(rng, n, n);
  return 0.5 * (a + a.transpose());
}

// Q diag(lo..hi) Q^T with a random orthogonal Q.
inline learnpath::Matrix random_spd(std::mt19937_64& rng, int n, double lo = 0.5, double hi = 2.0) {
  Eigen::HouseholderQR<learnpath::Matrix> qr(random_matrix(rng, n, n));
  const learnpath::Matrix q = qr.householderQ();
  std::uniform_real_distribution<double> unif(lo, hi);
  learnpath::Vector lam(n);
  for (int i = 0; i < n; ++i) lam(i) = unif(rng);
  learnpath::Matrix out = q * lam.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

inline double rel_fro(const learnpath::Matrix& a, const learnpath::Matrix& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

}  // namespace testsupport
