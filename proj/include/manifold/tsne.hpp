#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "manifold/embedding.hpp"
#include "manifold/neighbors.hpp"
#include "manifold/parallel.hpp"
#include "manifold/rng.hpp"

namespace manifold {

/// Symmetric joint probabilities P (zero diagonal, total mass 1) and the
/// per-point gaussian bandwidths that produced them.
struct CalibratedAffinities {
  Matrix P;
  double perplexity = 0.0;
  std::vector<double> sigma;
};

namespace detail {

/// Conditional row p_{j|i} for bandwidth sigma; returns the Shannon entropy in bits.
inline double conditional_row(const Matrix& D2, Eigen::Index i, double sigma, double min_d2, Vector& row) {
  const Eigen::Index n = D2.rows();
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    row[j] = j == i ? 0.0 : std::exp(-(D2(i, j) - min_d2) * inv);
    sum += row[j];
  }
  double h = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    row[j] /= sum;
    if (row[j] > 0.0) h -= row[j] * std::log2(row[j]);
  }
  return h;
}

}  // namespace detail

/// Per-point bisection on sigma (geometric midpoints over [1e-20, 1e20],
/// at most 64 steps) until |2^H - perplexity| <= 1e-5, then
/// P = (P_{j|i} + P_{i|j}) / (2n).
inline CalibratedAffinities calibrate_perplexity(const DistanceMatrix& D, double perplexity) {
  const auto n = static_cast<Eigen::Index>(D.n());
  if (!(perplexity > 1.0) || !(perplexity < static_cast<double>(n)))
    throw Error(ErrorKind::Config, "perplexity=" + std::to_string(perplexity) + " n=" + std::to_string(n));
  const Matrix D2 = D.values().cwiseProduct(D.values());
  Matrix cond(n, n);
  std::vector<double> sigma(static_cast<std::size_t>(n));
  const double target = std::log2(perplexity);

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    double min_d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) min_d2 = std::min(min_d2, D2(i, j));
    Vector row(n);
    double lo = 1e-20, hi = 1e20;
    double s = 1.0;
    bool below = false, above = false;  // seen entropy below / above target
    bool done = false;
    for (int step = 0; step < 64; ++step) {
      const double h = detail::conditional_row(D2, i, s, min_d2, row);
      if (std::abs(std::exp2(h) - perplexity) <= 1e-5) {
        done = true;
        break;
      }
      if (h > target) {
        above = true;
        hi = s;
      } else {
        below = true;
        lo = s;
      }
      s = std::sqrt(lo * hi);
    }
    if (!done) {
      if (!(below && above))
        throw Error(ErrorKind::CalibrationFailure,
                    "point=" + std::to_string(i) + " perplexity=" + std::to_string(perplexity));
      detail::conditional_row(D2, i, s, min_d2, row);
    }
    cond.row(i) = row.transpose();
    sigma[ii] = s;
  });

  CalibratedAffinities out;
  out.P = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
  out.perplexity = perplexity;
  out.sigma = std::move(sigma);
  return out;
}

/// Shannon entropy (bits) of row i of the conditional distribution for the
/// calibrated bandwidth; exposed for verification.
inline double conditional_entropy(const DistanceMatrix& D, const CalibratedAffinities& cal, std::size_t i) {
  const Matrix D2 = D.values().cwiseProduct(D.values());
  const auto ii = static_cast<Eigen::Index>(i);
  double min_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < D2.cols(); ++j)
    if (j != ii) min_d2 = std::min(min_d2, D2(ii, j));
  Vector row(D2.cols());
  return detail::conditional_row(D2, ii, cal.sigma[i], min_d2, row);
}

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t dim = 2;
  double learning_rate = 200.0;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch_iter = 250;
  double exaggeration = 12.0;
  std::size_t exaggeration_iters = 250;
  std::size_t max_iter = 1000;
  std::uint64_t seed = 0;
};

/// Minimum p_ij used inside the logarithm of the loss.
inline constexpr double kProbabilityFloor = 1e-12;

/// KL(P || Q) for the student-t kernel q_ij = (1+|y_i-y_j|^2)^-1 / Z.
inline double tsne_kl(const Matrix& P, const Matrix& Y) {
  const Eigen::Index n = Y.rows();
  Matrix num(n, n);
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      num(i, j) = i == j ? 0.0 : 1.0 / (1.0 + (Y.row(i) - Y.row(j)).squaredNorm());
      z += num(i, j);
    }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || P(i, j) <= 0.0) continue;
      const double p = std::max(P(i, j), kProbabilityFloor);
      kl += P(i, j) * std::log(p / (num(i, j) / z));
    }
  return kl;
}

/// Analytic gradient dKL/dy_i = 4 sum_j (p_ij - q_ij) (1+|y_i-y_j|^2)^-1 (y_i - y_j),
/// with P scaled by `exaggeration`. Rows are accumulated in fixed j order.
inline Matrix tsne_gradient(const Matrix& P, const Matrix& Y, double exaggeration = 1.0) {
  const Eigen::Index n = Y.rows();
  const Eigen::Index m = Y.cols();
  Matrix num(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = 0; j < n; ++j)
      num(i, j) = i == j ? 0.0 : 1.0 / (1.0 + (Y.row(i) - Y.row(j)).squaredNorm());
  });
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) z += num.row(i).sum();
  Matrix grad(n, m);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(m);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double q = num(i, j) / z;
      g += (exaggeration * P(i, j) - q) * num(i, j) * (Y.row(i) - Y.row(j));
    }
    grad.row(i) = 4.0 * g;
  });
  return grad;
}

struct TsneResult {
  Embedding embedding;
  std::vector<double> kl;  // KL(P||Q) after each iteration, unexaggerated P
  std::size_t exaggeration_end = 0;  // index into kl of the last exaggerated iteration
};

/// Exact t-SNE gradient descent with momentum, early exaggeration and
/// per-coordinate adaptive gains (+0.2 / x0.8, floor 0.01). The map is
/// re-centered after each step.
inline TsneResult tsne_embed(const CalibratedAffinities& cal, const TsneConfig& cfg) {
  const Eigen::Index n = cal.P.rows();
  const auto m = static_cast<Eigen::Index>(cfg.dim);
  if (cfg.exaggeration < 1.0) throw Error(ErrorKind::Config, "exaggeration must be >= 1");
  if (cfg.max_iter < 1) throw Error(ErrorKind::Config, "max_iter must be >= 1");
  if (m < 1) throw Error(ErrorKind::Config, "dim must be >= 1");

  Rng rng(cfg.seed);
  Matrix Y(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) Y(i, j) = 1e-4 * rng.normal();
  Matrix update = Matrix::Zero(n, m);
  Matrix gains = Matrix::Ones(n, m);

  TsneResult res;
  res.kl.reserve(cfg.max_iter);
  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    const double ex = it < cfg.exaggeration_iters ? cfg.exaggeration : 1.0;
    const double momentum = it < cfg.momentum_switch_iter ? cfg.initial_momentum : cfg.final_momentum;
    const Matrix grad = tsne_gradient(cal.P, Y, ex);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        const bool same_sign = (grad(i, j) > 0) == (update(i, j) > 0);
        gains(i, j) = std::max(same_sign ? gains(i, j) * 0.8 : gains(i, j) + 0.2, 0.01);
        update(i, j) = momentum * update(i, j) - cfg.learning_rate * gains(i, j) * grad(i, j);
        Y(i, j) += update(i, j);
      }
    Y.rowwise() -= Y.colwise().mean();
    if (!Y.allFinite())
      throw Error(ErrorKind::NumericalOverflow, "iteration=" + std::to_string(it) +
                                                    " learning_rate=" + std::to_string(cfg.learning_rate));
    const double kl = tsne_kl(cal.P, Y);
    if (!std::isfinite(kl)) throw Error(ErrorKind::NumericalOverflow, "iteration=" + std::to_string(it) + " kl");
    res.kl.push_back(kl);
  }
  res.exaggeration_end = std::min(cfg.exaggeration_iters, cfg.max_iter) - (cfg.exaggeration_iters > 0 ? 1 : 0);
  res.embedding.coords = std::move(Y);
  res.embedding.algorithm = "tsne";
  res.embedding.seed = cfg.seed;
  res.embedding.params = {{"perplexity", cal.perplexity},
                          {"dim", cfg.dim},
                          {"learning_rate", cfg.learning_rate},
                          {"momentum", {cfg.initial_momentum, cfg.final_momentum}},
                          {"momentum_switch_iter", cfg.momentum_switch_iter},
                          {"exaggeration", cfg.exaggeration},
                          {"exaggeration_iters", cfg.exaggeration_iters},
                          {"max_iter", cfg.max_iter}};
  return res;
}

}  // namespace manifold
