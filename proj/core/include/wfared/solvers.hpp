#ifndef WFARED_SOLVERS_HPP
#define WFARED_SOLVERS_HPP

#include <Eigen/Dense>

#include "wfared/tolerances.hpp"

namespace wfared {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Real Schur form with the diagonal blocks ordered by non-decreasing
/// eigenvalue modulus.  Conjugate pairs share a modulus, so no 2x2 block
/// ever straddles `split_index`.
struct SchurForm {
  Matrix U;              ///< orthogonal
  Matrix T;              ///< quasi-upper-triangular, U^T A U = T
  Index split_index = 0; ///< number of eigenvalues with |lambda| < 1
};

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Matrix& A);

/// Solves the Stein equation X - A X A^T = S for symmetric S.
///
/// Uses the vectorized dense solve (1 - A (x) A) vec(X) = vec(S) up to
/// n = 32 and the squaring (doubling) iteration above that.  Requires
/// rho(A) < 1 for a unique solution.
Matrix solve_discrete_lyapunov(const Matrix& A, const Matrix& S,
                               const Tolerances& tol = {});

/// Solves Ap X - X Am + C = 0 by Bartels-Stewart.  The spectra of Ap and
/// Am must be disjoint.
Matrix solve_sylvester(const Matrix& Ap, const Matrix& Am, const Matrix& C,
                       const Tolerances& tol = {});

/// Real Schur decomposition reordered by orthogonal block swaps so that
/// eigenvalue moduli are non-decreasing along the diagonal.  Throws
/// EigenvalueOnCircle when some modulus is within tol.circle of 1.
SchurForm ordered_schur(const Matrix& A, const Tolerances& tol = {});

/// Kronecker product, used by the vectorized small-problem solvers.
Matrix kronecker(const Matrix& A, const Matrix& B);

/// Pivoted Cholesky factor of a positive semidefinite matrix:
/// M = L L^T with L of size n x rank.  Stops at the first pivot below
/// rel_tol times the largest initial diagonal entry.
struct PivotedCholesky {
  Matrix L;
  Index rank = 0;
};
PivotedCholesky pivoted_cholesky(const Matrix& M, double rel_tol);

}  // namespace wfared

#endif
