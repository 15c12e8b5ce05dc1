#include "learnpath/matfun.hpp"

#include <cmath>
#include <sstream>

#include "learnpath/error.hpp"

namespace learnpath::matfun {
namespace {

void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream msg;
    msg << what << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
  if (!a.allFinite()) {
    throw_error(ErrorCode::kInvalidInput, std::string(what) + ": non-finite entry");
  }
}

}  // namespace

SymEig sym_eig(const Matrix& a) {
  require_square_finite(a, "sym_eig");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "sym_eig: matrix is not symmetric (max |A - A^T| = " << asym << ")";
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw_error(ErrorCode::kNumericOverflow, "sym_eig: eigensolver did not converge");
  }
  SymEig out{solver.eigenvalues(), solver.eigenvectors()};
  // deterministic column signs
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    Eigen::Index arg = 0;
    out.eigenvectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (out.eigenvectors(arg, c) < 0.0) out.eigenvectors.col(c) *= -1.0;
  }
  return out;
}

Matrix sym_function(const SymEig& eig, const std::function<double(double)>& f) {
  Vector mapped(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = f(eig.eigenvalues(i));
  return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.transpose();
}

void check_spd(const SymEig& eig, const char* what) {
  const double largest = eig.eigenvalues.maxCoeff();
  const double smallest = eig.eigenvalues.minCoeff();
  if (!(largest > 0.0) || smallest < kEigenFloor * largest) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": eigenvalue " << smallest << " is below the floor "
        << kEigenFloor * std::max(largest, 0.0) << " (largest eigenvalue " << largest << ")";
    throw_error(ErrorCode::kSingularMatrix, msg.str());
  }
}

Matrix spd_sqrt(const Matrix& a) {
  const SymEig eig = sym_eig(a);
  check_spd(eig, "spd_sqrt");
  return sym_function(eig, [](double x) { return std::sqrt(x); });
}

Matrix spd_inv_sqrt(const Matrix& a) {
  const SymEig eig = sym_eig(a);
  check_spd(eig, "spd_inv_sqrt");
  return sym_function(eig, [](double x) { return 1.0 / std::sqrt(x); });
}

Matrix spd_inverse(const Matrix& a) {
  const SymEig eig = sym_eig(a);
  check_spd(eig, "spd_inverse");
  return sym_function(eig, [](double x) { return 1.0 / x; });
}

GeneralizedSqrtResult pair_sqrt(const Matrix& g, const Matrix& h) {
  if (g.rows() != h.rows() || g.cols() != h.cols()) {
    throw_error(ErrorCode::kInvalidInput, "pair_sqrt: G and H dimensions differ");
  }
  const SymEig g_eig = sym_eig(g);
  check_spd(g_eig, "pair_sqrt (metric G)");
  const Matrix g_half = sym_function(g_eig, [](double x) { return std::sqrt(x); });
  const Matrix g_inv_half = sym_function(g_eig, [](double x) { return 1.0 / std::sqrt(x); });

  const Matrix inner = g_inv_half * h * g_inv_half;
  const SymEig inner_eig = sym_eig(0.5 * (inner + inner.transpose()));
  check_spd(inner_eig, "pair_sqrt (G^-1/2 H G^-1/2)");
  const Matrix inner_sqrt = sym_function(inner_eig, [](double x) { return std::sqrt(x); });

  GeneralizedSqrtResult out;
  out.value = g_inv_half * inner_sqrt * g_half;
  out.smallest_eigenvalue = std::min(g_eig.eigenvalues.minCoeff(), inner_eig.eigenvalues.minCoeff());
  return out;
}

Matrix pair_function(const Matrix& g, const Matrix& h, const std::function<double(double)>& f) {
  if (g.rows() != h.rows() || g.cols() != h.cols()) {
    throw_error(ErrorCode::kInvalidInput, "pair_function: G and H dimensions differ");
  }
  const SymEig g_eig = sym_eig(g);
  check_spd(g_eig, "pair_function (metric G)");
  const Matrix g_half = sym_function(g_eig, [](double x) { return std::sqrt(x); });
  const Matrix g_inv_half = sym_function(g_eig, [](double x) { return 1.0 / std::sqrt(x); });
  const Matrix inner = g_inv_half * h * g_inv_half;
  const SymEig inner_eig = sym_eig(0.5 * (inner + inner.transpose()));
  return g_inv_half * sym_function(inner_eig, f) * g_half;
}

Matrix mat_exp(const Matrix& a, double t) {
  require_square_finite(a, "mat_exp");
  if (!std::isfinite(t)) throw_error(ErrorCode::kInvalidInput, "mat_exp: non-finite time");
  const Eigen::Index n = a.rows();
  Matrix scaled = a * t;
  const double norm = scaled.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm)) throw_error(ErrorCode::kNumericOverflow, "mat_exp: norm of A t overflows");
  if (norm == 0.0) return Matrix::Identity(n, n);

  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  if (squarings > 1023) throw_error(ErrorCode::kNumericOverflow, "mat_exp: scaling exponent too large");
  scaled /= std::ldexp(1.0, squarings);

  // Horner evaluation of sum_{j=0}^{18} B^j / j!
  constexpr int kOrder = 18;
  const Matrix identity = Matrix::Identity(n, n);
  Matrix result = identity;
  for (int j = kOrder; j >= 1; --j) {
    result = identity + (scaled * result) / static_cast<double>(j);
  }
  for (int s = 0; s < squarings; ++s) {
    result = result * result;
    if (!result.allFinite()) throw_error(ErrorCode::kNumericOverflow, "mat_exp: overflow while squaring");
  }
  return result;
}

}  // namespace learnpath::matfun
