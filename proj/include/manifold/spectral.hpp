#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "manifold/embedding.hpp"
#include "manifold/linalg.hpp"
#include "manifold/neighbors.hpp"
#include "manifold/parallel.hpp"

namespace manifold {

/// Result of the generalized problem L y = lambda Dg y, kept so callers can
/// check residuals. Columns of `vectors` are the returned coordinates.
struct LaplacianSpectrum {
  Vector values;           // nontrivial eigenvalues, ascending
  Eigen::MatrixXd vectors;  // y = Dg^{-1/2} u, one column per output dimension
  double trivial_value = 0.0;
};

namespace detail {

inline std::vector<std::vector<Neighbor>> affinity_adjacency(const Matrix& W) {
  std::vector<std::vector<Neighbor>> adj(static_cast<std::size_t>(W.rows()));
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      if (i != j && W(i, j) > 0.0) adj[static_cast<std::size_t>(i)].push_back({static_cast<std::size_t>(j), W(i, j)});
  return adj;
}

}  // namespace detail

/// Smallest nontrivial generalized eigenpairs of (Dg - W, Dg), solved through
/// the normalized Laplacian I - Dg^{-1/2} W Dg^{-1/2}.
inline LaplacianSpectrum laplacian_spectrum(const AffinityMatrix& affinity, std::size_t m) {
  const Matrix& W = affinity.weights;
  const Eigen::Index n = W.rows();
  if (m < 1 || static_cast<Eigen::Index>(m) + 1 > n)
    throw Error(ErrorKind::Config, "dim=" + std::to_string(m) + " n=" + std::to_string(n));
  if ((W.array() < 0.0).any()) throw Error(ErrorKind::Format, "negative affinity");
  Matrix Wo = W;
  Wo.diagonal().setZero();
  const Vector degree = Wo.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(degree[i] > 0.0)) throw Error(ErrorKind::ZeroDegreeNode, "node=" + std::to_string(i));
  const auto labels = connected_components(detail::affinity_adjacency(Wo));
  if (component_sizes(labels).size() > 1) throw Error(ErrorKind::DisconnectedGraph, describe_components(labels));

  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd Lsym = -(inv_sqrt.asDiagonal() * Wo * inv_sqrt.asDiagonal());
  Lsym.diagonal().array() += 1.0;

  // Full spectrum so the trivial pair is identified by value, not position.
  const auto all = symmetric_eigen(Eigen::Ref<const Eigen::MatrixXd>(Lsym), static_cast<std::size_t>(n),
                                   EigenSide::Smallest);
  const double threshold = 1e-9 * std::max(std::abs(all.values.maxCoeff()), 1e-300);
  Eigen::Index trivial = 0;
  while (trivial < n && std::abs(all.values[trivial]) <= threshold) ++trivial;
  if (trivial != 1)
    throw Error(ErrorKind::DisconnectedGraph,
                "near-zero eigenvalues=" + std::to_string(trivial) + " (expected 1)");
  if (static_cast<Eigen::Index>(m) + 1 > n)
    throw Error(ErrorKind::Config, "dim=" + std::to_string(m) + " too large");

  LaplacianSpectrum out;
  out.trivial_value = all.values[0];
  out.values = all.values.segment(1, static_cast<Eigen::Index>(m));
  out.vectors = inv_sqrt.asDiagonal() * all.vectors.middleCols(1, static_cast<Eigen::Index>(m));
  fix_signs(out.vectors);
  return out;
}

/// Laplacian Eigenmaps: coordinates are the generalized eigenvectors
/// 2..m+1 of the graph Laplacian.
inline Embedding laplacian_eigenmaps(const AffinityMatrix& W, std::size_t m) {
  auto spec = laplacian_spectrum(W, m);
  Embedding e;
  e.coords = spec.vectors;
  e.algorithm = "laplacian_eigenmaps";
  e.params["dim"] = m;
  check_finite(e);
  return e;
}

/// Barycentric reconstruction weights for each point from its k neighbors.
/// Row i of `weights` is dense over n, non-zero only on i's neighbors.
struct LleWeights {
  Matrix weights;
};

/// Solves min ||x_i - sum_j w_ij x_j||^2 s.t. sum_j w_ij = 1 with the local
/// Gram matrix C regularized by reg * trace(C) / k on the diagonal.
inline LleWeights lle_weights(const Matrix& X, const KnnGraph& knn, double reg) {
  if (!(reg >= 0.0)) throw Error(ErrorKind::Config, "reg=" + std::to_string(reg));
  const std::size_t n = knn.n();
  const std::size_t k = knn.k();
  Matrix W = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    const auto& nbs = knn.neighbors(i);
    Eigen::MatrixXd Z(static_cast<Eigen::Index>(k), X.cols());
    for (std::size_t a = 0; a < k; ++a)
      Z.row(static_cast<Eigen::Index>(a)) = X.row(static_cast<Eigen::Index>(nbs[a].index)) -
                                            X.row(static_cast<Eigen::Index>(i));
    Eigen::MatrixXd C = Z * Z.transpose();
    const double trace = C.trace();
    C.diagonal().array() += reg * trace / static_cast<double>(k);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    if (!lu.isInvertible())
      throw Error(ErrorKind::SingularLocalGram, "point=" + std::to_string(i) + " reg=" + std::to_string(reg));
    Eigen::VectorXd w = lu.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(k)));
    w /= w.sum();
    for (std::size_t a = 0; a < k; ++a)
      W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nbs[a].index)) = w[static_cast<Eigen::Index>(a)];
  });
  return {std::move(W)};
}

/// Sum over points of the squared reconstruction residual.
inline double reconstruction_error(const Matrix& X, const Matrix& W) {
  return (X - W * X).squaredNorm();
}

/// Locally Linear Embedding: reconstruction weights, then the bottom
/// nonconstant eigenvectors of M = (I - W)^T (I - W).
inline Embedding lle(const Matrix& X, std::size_t k, std::size_t m, double reg = 1e-3,
                     Metric metric = Metric::Euclidean) {
  const auto n = static_cast<Eigen::Index>(X.rows());
  if (k < 1 || static_cast<Eigen::Index>(k) + 1 > n)
    throw Error(ErrorKind::KTooLarge, "k=" + std::to_string(k) + " n=" + std::to_string(n));
  if (m < 1 || static_cast<Eigen::Index>(m) + 1 > n)
    throw Error(ErrorKind::Config, "dim=" + std::to_string(m) + " n=" + std::to_string(n));
  const auto knn = knn_graph(pairwise_distances(X, metric), k);
  const auto W = lle_weights(X, knn, reg).weights;

  Eigen::MatrixXd IW = -Eigen::MatrixXd(W);
  IW.diagonal().array() += 1.0;
  Eigen::MatrixXd M = IW.transpose() * IW;
  // The constant vector is an exact null vector of M (weight rows sum to 1).
  // Shifting it above the spectrum removes it without relying on resolving
  // near-degenerate small eigenvalues.
  const double shift = 1.0 + M.cwiseAbs().rowwise().sum().maxCoeff();
  M.array() += shift / static_cast<double>(n);
  const auto r = symmetric_eigen(Eigen::Ref<const Eigen::MatrixXd>(M), m, EigenSide::Smallest);

  Embedding e;
  e.coords = r.vectors * std::sqrt(static_cast<double>(n));
  e.algorithm = "lle";
  e.params["k"] = k;
  e.params["dim"] = m;
  e.params["reg"] = reg;
  check_finite(e);
  return e;
}

}  // namespace manifold
