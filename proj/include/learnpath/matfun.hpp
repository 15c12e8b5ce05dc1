#pragma once

#include <functional>

#include "learnpath/types.hpp"

namespace learnpath::matfun {

// Eigenvalues below kEigenFloor * (largest eigenvalue) are treated as singular.
inline constexpr double kEigenFloor = 1e-12;

struct SymEig {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthonormal columns, largest-magnitude entry positive
};

struct GeneralizedSqrtResult {
  Matrix value;
  double smallest_eigenvalue = 0.0;
};

/// Eigendecomposition of a symmetric matrix. The input is symmetrized as
/// (A + A^T)/2 before factoring; asymmetry above 1e-10 (relative to the
/// largest entry) or non-finite entries raise InvalidInput.
SymEig sym_eig(const Matrix& a);

/// Q f(diag(lambda)) Q^T for symmetric A. No floor check.
Matrix sym_function(const SymEig& eig, const std::function<double(double)>& f);

/// Throws SingularMatrix when the spectrum has an eigenvalue under the floor.
void check_spd(const SymEig& eig, const char* what);

Matrix spd_sqrt(const Matrix& a);
Matrix spd_inv_sqrt(const Matrix& a);
Matrix spd_inverse(const Matrix& a);

/// Square root of G^{-1} H through G^{-1/2} (G^{-1/2} H G^{-1/2})^{1/2} G^{1/2},
/// so only symmetric factorizations are involved.
GeneralizedSqrtResult pair_sqrt(const Matrix& g, const Matrix& h);

/// f(G^{-1} H) for SPD G and symmetric H via the same similarity transform.
/// `f` acts on the eigenvalues of G^{-1/2} H G^{-1/2}.
Matrix pair_function(const Matrix& g, const Matrix& h,
                     const std::function<double(double)>& f);

/// exp(A t) by scaling and squaring with a degree-18 Taylor polynomial.
/// Returns the identity exactly when A t is the zero matrix.
Matrix mat_exp(const Matrix& a, double t);

}  // namespace learnpath::matfun
