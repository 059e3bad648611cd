// Small dense linear-algebra helpers for linear SDEs.
#pragma once

#include <Eigen/Dense>

namespace optofb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Solves A X + X A^T + C = 0 by Kronecker vectorization. Throws SolverError
/// when the operator is singular.
Matrix solve_lyapunov(const Matrix& A, const Matrix& C);

/// Largest real part among the eigenvalues of A.
double spectral_abscissa(const Matrix& A);

/// Exact discretization of dx = A x dt + B dW over one step h:
/// x_{n+1} = F x_n + w_n with w_n ~ N(0, Qd), Qd = int_0^h e^{As} B B^T e^{A^T s} ds.
/// Computed with Van Loan's block-exponential construction.
struct Discretization {
  Matrix transition;
  Matrix noise_cov;
  Matrix noise_factor;  ///< L with L L^T = Qd (symmetric PSD square root)
};

Discretization discretize(const Matrix& A, const Matrix& B, double h);

/// Symmetric square root factor of a PSD matrix; tiny negative eigenvalues from
/// rounding are clamped to zero.
Matrix psd_factor(const Matrix& S);

}  // namespace optofb
