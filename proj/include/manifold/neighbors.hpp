#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "manifold/dataset.hpp"
#include "manifold/error.hpp"
#include "manifold/parallel.hpp"

namespace manifold {

enum class Metric { Euclidean, Cosine };

inline Metric metric_from_name(const std::string& name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "cosine") return Metric::Cosine;
  throw Error(ErrorKind::Config, "unknown metric '" + name + "'");
}

/// Symmetric n x n matrix of non-negative distances with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  explicit DistanceMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols()) throw Error(ErrorKind::ShapeMismatch, "distance matrix not square");
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      if (values_(i, i) != 0.0) throw Error(ErrorKind::Format, "distance diagonal nonzero");
      for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        const double v = values_(i, j);
        if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::Format, "distance entry negative or non-finite");
        if (v != values_(j, i)) throw Error(ErrorKind::NonSymmetric, "distance matrix asymmetric");
      }
    }
  }

  std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

namespace detail {

inline double row_distance(const Matrix& X, Eigen::Index i, Eigen::Index j, Metric metric, const Vector& norms) {
  if (metric == Metric::Euclidean) return (X.row(i) - X.row(j)).norm();
  const double c = 1.0 - X.row(i).dot(X.row(j)) / (norms[i] * norms[j]);
  return std::max(0.0, c);
}

}  // namespace detail

/// Exact dense distances between the rows of X. Rows are computed in
/// parallel; each entry is produced by one worker, so results do not depend
/// on the worker count. Entry (i,j) is computed once for i<j and mirrored.
inline DistanceMatrix pairwise_distances(const Matrix& X, Metric metric = Metric::Euclidean) {
  const Eigen::Index n = X.rows();
  Vector norms = X.rowwise().norm();
  if (metric == Metric::Cosine)
    for (Eigen::Index i = 0; i < n; ++i)
      if (norms[i] == 0.0) throw Error(ErrorKind::ZeroNormRow, "row=" + std::to_string(i));
  Matrix D = Matrix::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = i + 1; j < n; ++j) D(i, j) = detail::row_distance(X, i, j, metric, norms);
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) D(i, j) = D(j, i);
  return DistanceMatrix(std::move(D));
}

inline DistanceMatrix pairwise_distances(const EmbeddingMatrix& X, Metric metric = Metric::Euclidean) {
  return pairwise_distances(X.values(), metric);
}

struct Neighbor {
  std::size_t index;
  double distance;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Directed k-nearest-neighbor lists, ascending by (distance, index).
/// Consumers that need an undirected graph use the union rule: an edge
/// exists if either endpoint lists the other.
class KnnGraph {
 public:
  KnnGraph(std::size_t k, std::vector<std::vector<Neighbor>> lists) : k_(k), lists_(std::move(lists)) {}

  std::size_t n() const { return lists_.size(); }
  std::size_t k() const { return k_; }
  const std::vector<Neighbor>& neighbors(std::size_t i) const { return lists_[i]; }

  /// Undirected adjacency under the union rule, sorted by neighbor index.
  std::vector<std::vector<Neighbor>> undirected() const {
    std::vector<std::vector<Neighbor>> adj(n());
    for (std::size_t i = 0; i < n(); ++i)
      for (const auto& nb : lists_[i]) {
        adj[i].push_back(nb);
        adj[nb.index].push_back({i, nb.distance});
      }
    for (auto& a : adj) {
      std::sort(a.begin(), a.end(), [](const Neighbor& x, const Neighbor& y) { return x.index < y.index; });
      a.erase(std::unique(a.begin(), a.end(),
                          [](const Neighbor& x, const Neighbor& y) { return x.index == y.index; }),
              a.end());
    }
    return adj;
  }

 private:
  std::size_t k_;
  std::vector<std::vector<Neighbor>> lists_;
};

/// k smallest off-diagonal distances per row; ties go to the smaller index.
inline KnnGraph knn_graph(const DistanceMatrix& D, std::size_t k) {
  const std::size_t n = D.n();
  if (k < 1 || k + 1 > n)
    throw Error(ErrorKind::KTooLarge, "k=" + std::to_string(k) + " n=" + std::to_string(n));
  std::vector<std::vector<Neighbor>> lists(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<Neighbor> cand;
    cand.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) cand.push_back({j, D(i, j)});
    auto less = [](const Neighbor& a, const Neighbor& b) {
      return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
    };
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), less);
    cand.resize(k);
    lists[i] = std::move(cand);
  });
  return KnnGraph(k, std::move(lists));
}

enum class DiagonalConvention { Zero, One };

/// Non-negative edge weights. The diagonal convention records what the
/// producing kernel put on the diagonal.
struct AffinityMatrix {
  Matrix weights;
  bool symmetric = true;
  DiagonalConvention diagonal = DiagonalConvention::Zero;

  std::size_t n() const { return static_cast<std::size_t>(weights.rows()); }
};

/// w(i,j) = exp(-d^2 / (2 sigma^2)). With a kNN graph, only union edges are
/// kept; the diagonal is zero.
inline AffinityMatrix gaussian_affinity(const DistanceMatrix& D, double sigma,
                                        const std::optional<KnnGraph>& sparsify = std::nullopt) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorKind::NonPositiveSigma, "sigma=" + std::to_string(sigma));
  const auto n = static_cast<Eigen::Index>(D.n());
  const double denom = 2.0 * sigma * sigma;
  Matrix W = Matrix::Zero(n, n);
  if (sparsify) {
    for (std::size_t i = 0; i < sparsify->n(); ++i)
      for (const auto& nb : sparsify->neighbors(i)) {
        const double w = std::exp(-nb.distance * nb.distance / denom);
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(nb.index);
        W(a, b) = std::max(W(a, b), w);
        W(b, a) = std::max(W(b, a), w);
      }
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double d = D.values()(i, j);
        W(i, j) = W(j, i) = std::exp(-d * d / denom);
      }
  }
  return {std::move(W), true, DiagonalConvention::Zero};
}

/// Adaptive-bandwidth decaying kernel: eps_i is the distance from i to its
/// k-th neighbor and
///   w(i,j) = 0.5 * (exp(-(d/eps_i)^alpha) + exp(-(d/eps_j)^alpha)).
/// The diagonal is 1.
inline AffinityMatrix alpha_decay_kernel(const DistanceMatrix& D, const KnnGraph& knn, double alpha) {
  if (!(alpha >= 1.0)) throw Error(ErrorKind::Config, "alpha=" + std::to_string(alpha) + " must be >= 1");
  if (knn.k() < 2) throw Error(ErrorKind::Config, "k=" + std::to_string(knn.k()) + " must be >= 2");
  const std::size_t n = D.n();
  std::vector<double> eps(n);
  for (std::size_t i = 0; i < n; ++i) {
    eps[i] = knn.neighbors(i).back().distance;
    if (!(eps[i] > 0.0)) throw Error(ErrorKind::ZeroBandwidth, "point=" + std::to_string(i));
  }
  Matrix W(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = D(i, j);
      const double a = std::exp(-std::pow(d / eps[i], alpha));
      const double b = std::exp(-std::pow(d / eps[j], alpha));
      // Summation order fixed by (min, max) so w(i,j) and w(j,i) are bitwise equal.
      W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          0.5 * (i < j ? a + b : b + a);
    }
  });
  for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, i) = 1.0;
  return {std::move(W), true, DiagonalConvention::One};
}

/// Component label per node, numbered in order of the lowest node index,
/// via BFS over union edges.
inline std::vector<std::size_t> connected_components(const std::vector<std::vector<Neighbor>>& adjacency) {
  const std::size_t n = adjacency.size();
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(n, unset);
  std::size_t next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != unset) continue;
    std::deque<std::size_t> queue{s};
    label[s] = next;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (const auto& nb : adjacency[u])
        if (label[nb.index] == unset) {
          label[nb.index] = next;
          queue.push_back(nb.index);
        }
    }
    ++next;
  }
  return label;
}

inline std::vector<std::size_t> connected_components(const KnnGraph& graph) {
  return connected_components(graph.undirected());
}

/// Component sizes from a label vector.
inline std::vector<std::size_t> component_sizes(const std::vector<std::size_t>& labels) {
  std::vector<std::size_t> sizes;
  for (auto l : labels) {
    if (l >= sizes.size()) sizes.resize(l + 1, 0);
    ++sizes[l];
  }
  return sizes;
}

/// Detail string of the form "components=2 sizes=5,5".
inline std::string describe_components(const std::vector<std::size_t>& labels) {
  const auto sizes = component_sizes(labels);
  std::string s = "components=" + std::to_string(sizes.size()) + " sizes=";
  for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? "," : "") + std::to_string(sizes[i]);
  return s;
}

}  // namespace manifold
