#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "manifold/embedding.hpp"
#include "manifold/linalg.hpp"
#include "manifold/neighbors.hpp"
#include "manifold/parallel.hpp"
#include "manifold/rng.hpp"

namespace manifold {

/// All-pairs shortest paths over the undirected (union) kNN graph with
/// euclidean edge lengths, one binary-heap Dijkstra per source.
inline DistanceMatrix geodesic_distances(const KnnGraph& graph) {
  const auto adj = graph.undirected();
  const auto labels = connected_components(adj);
  if (component_sizes(labels).size() > 1) throw Error(ErrorKind::DisconnectedGraph, describe_components(labels));

  const std::size_t n = graph.n();
  Matrix G(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t s) {
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[s] = 0.0;
    heap.push({0.0, s});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (const auto& nb : adj[u]) {
        const double nd = d + nb.distance;
        if (nd < dist[nb.index]) {
          dist[nb.index] = nd;
          heap.push({nd, nb.index});
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j) G(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = dist[j];
  });
  // Path sums can differ in the last bit between the two directions; keep
  // the smaller so the matrix is exactly symmetric.
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    for (Eigen::Index j = i + 1; j < G.cols(); ++j) G(i, j) = G(j, i) = std::min(G(i, j), G(j, i));
  return DistanceMatrix(std::move(G));
}

/// Classical (Torgerson) MDS on the m largest eigenvalues of the
/// double-centered squared distances. Negative eigenvalues are clamped to 0.
inline Embedding classical_mds(const Matrix& D, std::size_t m) {
  const Eigen::Index n = D.rows();
  if (D.cols() != n) throw Error(ErrorKind::ShapeMismatch, "distance matrix not square");
  if (m < 1 || static_cast<Eigen::Index>(m) > n)
    throw Error(ErrorKind::Config, "dim=" + std::to_string(m) + " n=" + std::to_string(n));
  const Matrix B = double_center(D.cwiseProduct(D));
  const auto full = symmetric_eigen(B, static_cast<std::size_t>(n), EigenSide::Smallest);
  const double lmax = std::max(0.0, full.values.maxCoeff());

  Embedding e;
  e.coords = Matrix::Zero(n, static_cast<Eigen::Index>(m));
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(m); ++c) {
    const Eigen::Index src = n - 1 - c;  // descending
    double lambda = full.values[src];
    if (lambda < 0.0) {
      if (-lambda > 1e-8 * lmax)
        warn("classical_mds: clamped negative eigenvalue " + std::to_string(lambda) + " to 0");
      lambda = 0.0;
    }
    e.coords.col(c) = full.vectors.col(src) * std::sqrt(lambda);
  }
  e.algorithm = "classical_mds";
  e.params["dim"] = m;
  return e;
}

inline Embedding classical_mds(const DistanceMatrix& D, std::size_t m) { return classical_mds(D.values(), m); }

/// ISOMAP: classical MDS on kNN-graph geodesics.
inline Embedding isomap(const Matrix& X, std::size_t k, std::size_t m, Metric metric = Metric::Euclidean) {
  const auto D = pairwise_distances(X, metric);
  const auto G = geodesic_distances(knn_graph(D, k));
  auto e = classical_mds(G, m);
  e.algorithm = "isomap";
  e.params = {{"k", k}, {"dim", m}};
  return e;
}

struct SmacofOptions {
  std::size_t max_iter = 300;
  double eps = 1e-6;
  std::uint64_t seed = 0;
};

struct SmacofResult {
  Embedding embedding;
  std::vector<double> stress;  // raw stress; entry 0 is the initial configuration
  std::size_t iterations = 0;

  double normalized_stress(const Matrix& D) const {
    double denom = 0.0;
    for (Eigen::Index i = 0; i < D.rows(); ++i)
      for (Eigen::Index j = i + 1; j < D.cols(); ++j) denom += D(i, j) * D(i, j);
    return denom > 0.0 ? stress.back() / denom : stress.back();
  }
};

/// sigma(Y) = sum_{i<j} (d_ij - |y_i - y_j|)^2
inline double raw_stress(const Matrix& D, const Matrix& Y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < Y.rows(); ++i)
    for (Eigen::Index j = i + 1; j < Y.rows(); ++j) {
      const double r = D(i, j) - (Y.row(i) - Y.row(j)).norm();
      s += r * r;
    }
  return s;
}

/// Uniform [-1, 1]^m start from the pinned generator, row-major fill order.
inline Matrix random_uniform_start(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  Matrix Y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < Y.rows(); ++i)
    for (Eigen::Index j = 0; j < Y.cols(); ++j) Y(i, j) = rng.uniform(-1.0, 1.0);
  return Y;
}

/// Metric MDS by SMACOF with unit weights: repeated Guttman transforms
/// Y <- (1/n) B(Y) Y. Pairs closer than 1e-15 contribute no B term.
inline SmacofResult smacof_mds(const Matrix& D, Matrix init, const SmacofOptions& opt) {
  const Eigen::Index n = D.rows();
  if (D.cols() != n || init.rows() != n) throw Error(ErrorKind::ShapeMismatch, "smacof input sizes disagree");
  if (opt.max_iter < 1) throw Error(ErrorKind::Config, "max_iter must be >= 1");
  const Eigen::Index m = init.cols();

  SmacofResult res;
  Matrix Y = std::move(init);
  res.stress.push_back(raw_stress(D, Y));
  Matrix next(n, m);
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
      const auto i = static_cast<Eigen::Index>(ii);
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(m);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double dist = (Y.row(i) - Y.row(j)).norm();
        if (dist < 1e-15) continue;
        acc += (D(i, j) / dist) * (Y.row(i) - Y.row(j));
      }
      next.row(i) = acc / static_cast<double>(n);
    });
    Y.swap(next);
    const double s = raw_stress(D, Y);
    const double prev = res.stress.back();
    res.stress.push_back(s);
    res.iterations = it + 1;
    if (prev <= 0.0 || (prev - s) / prev < opt.eps) break;
  }
  res.embedding.coords = std::move(Y);
  res.embedding.algorithm = "smacof";
  res.embedding.seed = opt.seed;
  res.embedding.params = {{"dim", m}, {"max_iter", opt.max_iter}, {"eps", opt.eps}};
  check_finite(res.embedding);
  return res;
}

inline SmacofResult smacof_mds(const Matrix& D, std::size_t m, const SmacofOptions& opt) {
  return smacof_mds(D, random_uniform_start(static_cast<std::size_t>(D.rows()), m, opt.seed), opt);
}

}  // namespace manifold
