#include "optofb/linalg.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "optofb/model.hpp"

namespace optofb {

Matrix solve_lyapunov(const Matrix& A, const Matrix& C) {
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix op = Eigen::kroneckerProduct(I, A) + Eigen::kroneckerProduct(A, I);
  Eigen::FullPivLU<Matrix> lu(op);
  if (!lu.isInvertible()) throw SolverError("Lyapunov operator is singular");
  const Vector rhs = -Eigen::Map<const Vector>(C.data(), n * n);
  Vector x = lu.solve(rhs);
  Matrix X = Eigen::Map<Matrix>(x.data(), n, n);
  return 0.5 * (X + X.transpose());
}

double spectral_abscissa(const Matrix& A) {
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues().real().maxCoeff();
}

Matrix psd_factor(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()));
  Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Discretization discretize(const Matrix& A, const Matrix& B, double h) {
  const Eigen::Index n = A.rows();
  Matrix M = Matrix::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n) = -A;
  M.topRightCorner(n, n) = B * B.transpose();
  M.bottomRightCorner(n, n) = A.transpose();
  const Matrix E = (M * h).exp();
  Discretization d;
  d.transition = E.bottomRightCorner(n, n).transpose();
  d.noise_cov = d.transition * E.topRightCorner(n, n);
  d.noise_cov = 0.5 * (d.noise_cov + d.noise_cov.transpose());
  d.noise_factor = psd_factor(d.noise_cov);
  return d;
}

}  // namespace optofb
