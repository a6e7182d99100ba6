#include <gtest/gtest.h>

#include <random>

#include "manifold/spectral.hpp"
#include "support/helpers.hpp"

using namespace manifold;
using testing_support::to_matrix;

namespace {

// Ring plus random chords: connected, positive weights, zero diagonal.
AffinityMatrix random_connected(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> w(0.1, 1.0), coin(0.0, 1.0);
  Matrix W = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>((i + 1) % n);
    W(a, b) = W(b, a) = w(gen);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j)
      if (coin(gen) < 0.1) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        W(a, b) = W(b, a) = w(gen);
      }
  return {W, true, DiagonalConvention::Zero};
}

double generalized_residual(const AffinityMatrix& A, const LaplacianSpectrum& s) {
  const Vector deg = A.weights.rowwise().sum();
  Matrix L = -A.weights;
  L.diagonal() += deg;
  double worst = 0.0;
  for (Eigen::Index c = 0; c < s.vectors.cols(); ++c) {
    const Eigen::VectorXd y = s.vectors.col(c);
    worst = std::max(worst, (L * y - s.values[c] * deg.cwiseProduct(y)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST(LaplacianSpectrum, PathGraphOfThree) {
  Matrix W{{0.0, 1.0, 0.0}, {1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}};
  auto s = laplacian_spectrum({W, true, DiagonalConvention::Zero}, 2);
  EXPECT_NEAR(s.values[0], 1.0, 1e-12);
  EXPECT_NEAR(s.values[1], 2.0, 1e-12);
  EXPECT_LE(std::abs(s.trivial_value), 1e-12);
  // The Fiedler vector separates the two ends.
  EXPECT_LT(s.vectors(0, 0) * s.vectors(2, 0), 0.0);
  EXPECT_NEAR(s.vectors(1, 0), 0.0, 1e-12);
}

TEST(LaplacianSpectrum, ResidualAndTrivialPairOnRandomGraphs) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const std::size_t n = 20 + 18 * seed;
    const auto A = random_connected(n, seed);
    const auto s = laplacian_spectrum(A, 3);
    EXPECT_LE(generalized_residual(A, s), 1e-8) << "seed " << seed;
    EXPECT_LE(std::abs(s.trivial_value), 1e-10);
    EXPECT_GT(s.values[0], 1e-9);
    // D-orthogonal to the constant vector.
    const Vector deg = A.weights.rowwise().sum();
    for (Eigen::Index c = 0; c < 3; ++c) EXPECT_NEAR(deg.dot(s.vectors.col(c)), 0.0, 1e-9);
  }
}

TEST(LaplacianSpectrum, SelfLoopsIgnored) {
  auto A = random_connected(15, 3);
  auto B = A;
  B.weights.diagonal().setConstant(0.5);
  const auto a = laplacian_spectrum(A, 2), b = laplacian_spectrum(B, 2);
  EXPECT_LE((a.values - b.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LaplacianSpectrum, Errors) {
  Matrix two_blobs = Matrix::Zero(4, 4);
  two_blobs(0, 1) = two_blobs(1, 0) = 1.0;
  two_blobs(2, 3) = two_blobs(3, 2) = 1.0;
  try {
    laplacian_spectrum({two_blobs, true, DiagonalConvention::Zero}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DisconnectedGraph);
    EXPECT_EQ(e.detail(), "components=2 sizes=2,2");
  }
  Matrix isolated = Matrix::Zero(3, 3);
  isolated(0, 1) = isolated(1, 0) = 1.0;
  try {
    laplacian_spectrum({isolated, true, DiagonalConvention::Zero}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroDegreeNode);
  }
  EXPECT_THROW(laplacian_spectrum(random_connected(5, 1), 5), Error);
}

TEST(LaplacianEigenmaps, EmbeddingShape) {
  const auto A = random_connected(30, 9);
  const auto e = laplacian_eigenmaps(A, 2);
  EXPECT_EQ(e.n(), 30u);
  EXPECT_EQ(e.dim(), 2u);
  EXPECT_EQ(e.algorithm, "laplacian_eigenmaps");
  EXPECT_TRUE(e.coords.allFinite());
}

TEST(LleWeights, MidpointExample) {
  Matrix X{{0.0, 0.0}, {-1.0, 0.0}, {1.0, 0.0}, {0.0, 5.0}};
  const auto knn = knn_graph(pairwise_distances(X), 2);
  const auto W = lle_weights(X, knn, 1e-3).weights;
  EXPECT_NEAR(W(0, 1), 0.5, 1e-12);
  EXPECT_NEAR(W(0, 2), 0.5, 1e-12);
}

TEST(LleWeights, MatchOracleAndSumToOne) {
  for (unsigned seed = 0; seed < 30; ++seed) {
    const std::size_t n = 20 + seed, k = 3 + seed % 5;
    const auto pts = oracle::random_points(n, 3, 300 + seed);
    const Matrix X = to_matrix(pts);
    const auto knn = knn_graph(pairwise_distances(X), k);
    const auto W = lle_weights(X, knn, 1e-3).weights;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> nbrs;
      for (const auto& nb : knn.neighbors(i)) nbrs.push_back(nb.index);
      const auto ref = oracle::lle_weights(pts, i, nbrs, 1e-3);
      for (std::size_t a = 0; a < k; ++a)
        EXPECT_NEAR(W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nbrs[a])), ref[a], 1e-8);
      EXPECT_NEAR(W.row(static_cast<Eigen::Index>(i)).sum(), 1.0, 1e-12);
    }
  }
}

TEST(LleWeights, SingularWithoutRegularization) {
  // Three neighbors on a line in 2-D with k > d and reg = 0.
  Matrix X{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}, {4.0, 0.0}};
  const auto knn = knn_graph(pairwise_distances(X), 3);
  try {
    lle_weights(X, knn, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularLocalGram);
  }
}

TEST(Lle, RecoversOrderOnALine) {
  Matrix X(50, 3);
  for (Eigen::Index i = 0; i < 50; ++i) X.row(i) << 0.2 * i, 0.4 * i, -0.1 * i;
  const auto e = lle(X, 5, 1);
  const auto y = testing_support::column(e.coords, 0);
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < y.size(); ++i) {
    inc = inc && y[i] > y[i - 1];
    dec = dec && y[i] < y[i - 1];
  }
  EXPECT_TRUE(inc || dec);
  // Centered with unit mean-square coordinate.
  EXPECT_NEAR(e.coords.col(0).mean(), 0.0, 1e-8);
  EXPECT_NEAR(e.coords.col(0).squaredNorm() / 50.0, 1.0, 1e-8);
}

TEST(Lle, ParameterErrors) {
  const Matrix X = to_matrix(oracle::random_points(10, 3, 1));
  try {
    lle(X, 10, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::KTooLarge);
  }
  EXPECT_THROW(lle(X, 3, 2, -1.0), Error);
}
