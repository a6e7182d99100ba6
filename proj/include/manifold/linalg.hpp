#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "manifold/dataset.hpp"
#include "manifold/error.hpp"

namespace manifold {

enum class EigenSide { Smallest, Largest };

/// Eigenpairs in ascending eigenvalue order; column j of `vectors` pairs
/// with `values[j]`.
struct EigenResult {
  Vector values;
  Eigen::MatrixXd vectors;
};

/// Flips each column so its largest-magnitude entry (first on ties) is positive.
template <class Derived>
void fix_signs(Eigen::MatrixBase<Derived>& V) {
  for (Eigen::Index c = 0; c < V.cols(); ++c) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index r = 0; r < V.rows(); ++r)
      if (std::abs(V(r, c)) > mag) {
        mag = std::abs(V(r, c));
        best = r;
      }
    if (V(best, c) < 0) V.col(c) = -V.col(c);
  }
}

/// `count` extreme eigenpairs of a symmetric matrix. The input is checked for
/// symmetry (1e-10 relative to its largest entry) and symmetrized.
inline EigenResult symmetric_eigen(const Eigen::Ref<const Eigen::MatrixXd>& A, std::size_t count,
                                   EigenSide side) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw Error(ErrorKind::ShapeMismatch, "matrix not square");
  if (count < 1 || static_cast<Eigen::Index>(count) > n)
    throw Error(ErrorKind::Config, "count=" + std::to_string(count) + " n=" + std::to_string(n));
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-10 * scale)) throw Error(ErrorKind::NonSymmetric, "asymmetry=" + std::to_string(asym));
  const Eigen::MatrixXd S = 0.5 * (A + A.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "n=" + std::to_string(n));

  const auto m = static_cast<Eigen::Index>(count);
  const Eigen::Index start = side == EigenSide::Smallest ? 0 : n - m;
  EigenResult r{solver.eigenvalues().segment(start, m), solver.eigenvectors().middleCols(start, m)};
  fix_signs(r.vectors);
  return r;
}

inline EigenResult symmetric_eigen(const Matrix& A, std::size_t count, EigenSide side) {
  const Eigen::MatrixXd a = A;
  return symmetric_eigen(Eigen::Ref<const Eigen::MatrixXd>(a), count, side);
}

/// B = -1/2 J D2 J with J = I - 11^T/n, via row, column and grand means.
inline Matrix double_center(const Matrix& D2) {
  const Eigen::Index n = D2.rows();
  if (n == 0) return D2;
  const Vector row_mean = D2.rowwise().mean();
  const Vector col_mean = D2.colwise().mean().transpose();
  const double grand = row_mean.mean();
  Matrix B(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) B(i, j) = -0.5 * (D2(i, j) - row_mean[i] - col_mean[j] + grand);
  return 0.5 * (B + B.transpose());
}

/// Root-mean-square residual of the best similarity fit of Y onto X
/// (translation, orthogonal transform including reflection, uniform scale).
/// The residual is evaluated explicitly after alignment rather than by the
/// closed-form trace identity, which loses half the digits for near-exact fits.
inline double procrustes_error(const Matrix& X, const Matrix& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw Error(ErrorKind::ShapeMismatch, "X=" + std::to_string(X.rows()) + "x" + std::to_string(X.cols()) +
                                              " Y=" + std::to_string(Y.rows()) + "x" + std::to_string(Y.cols()));
  if (X.rows() < 2) throw Error(ErrorKind::ShapeMismatch, "procrustes needs n >= 2");
  const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  const Eigen::MatrixXd Yc = Y.rowwise() - Y.colwise().mean();
  const double yy = Yc.squaredNorm();
  Eigen::MatrixXd fitted = Eigen::MatrixXd::Zero(Xc.rows(), Xc.cols());
  if (yy > 0.0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Yc.transpose() * Xc, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd R = svd.matrixU() * svd.matrixV().transpose();
    const double s = svd.singularValues().sum() / yy;
    fitted = s * Yc * R;
  }
  return std::sqrt((Xc - fitted).squaredNorm() / static_cast<double>(X.rows()));
}

}  // namespace manifold
