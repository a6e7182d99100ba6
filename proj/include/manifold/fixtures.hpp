#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "manifold/dataset.hpp"
#include "manifold/error.hpp"
#include "manifold/rng.hpp"

namespace manifold::fixtures {

enum class Generator { SwissRoll, GaussianClusters, Line1d, Trajectory };

inline Generator generator_from_name(const std::string& s) {
  if (s == "swiss_roll") return Generator::SwissRoll;
  if (s == "gaussian_clusters") return Generator::GaussianClusters;
  if (s == "line_1d") return Generator::Line1d;
  if (s == "trajectory") return Generator::Trajectory;
  throw Error(ErrorKind::InvalidSpec, "generator='" + s + "'");
}

inline std::string generator_name(Generator g) {
  switch (g) {
    case Generator::SwissRoll: return "swiss_roll";
    case Generator::GaussianClusters: return "gaussian_clusters";
    case Generator::Line1d: return "line_1d";
    case Generator::Trajectory: return "trajectory";
  }
  return "";
}

struct SyntheticSpec {
  Generator generator = Generator::GaussianClusters;
  std::size_t n = 300;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::size_t clusters = 3;     // gaussian_clusters only
  std::size_t features = 10;    // gaussian_clusters only
};

/// Samples, annotations (id + "label") and the ground-truth
/// parameterization, one row per sample.
struct Synthetic {
  LabeledDataset dataset;
  Matrix ground_truth;
};

inline constexpr double kClusterSigma = 0.5;
inline constexpr double kSwissRollHeight = 20.0;

namespace detail {

inline Synthetic assemble(Matrix X, Matrix truth, std::vector<std::string> labels) {
  auto ids = EmbeddingMatrix::default_ids(X.rows());
  EmbeddingMatrix em(std::move(X), ids);
  AnnotationTable ann(ids, {"label"}, {std::move(labels)});
  return {LabeledDataset{std::move(em), std::move(ann), "label"}, std::move(truth)};
}

/// Four equal-width bins of a scalar parameter, labelled "bin0".."bin3".
inline std::string bin_label(double v, double lo, double hi) {
  int b = static_cast<int>(std::floor(4.0 * (v - lo) / (hi - lo)));
  b = std::clamp(b, 0, 3);
  return "bin" + std::to_string(b);
}

}  // namespace detail

/// Deterministic generators (all draws from the pinned Rng, in row order):
///  - swiss_roll: t ~ U[1.5pi, 4.5pi], h ~ U[0, 20], x = (t cos t, h, t sin t)
///    plus isotropic gaussian noise; ground truth (t, h); labels bin t.
///  - gaussian_clusters: c isotropic clusters (sigma 0.5) in `features`
///    dimensions centred at 10 sigma * e_c (pairwise centre distance
///    10 sigma * sqrt 2); sample i belongs to cluster i mod c; ground truth is
///    the cluster id.
///  - line_1d: s ~ U[0, 10], x = p0 + s u for a fixed unit direction u in 3-D;
///    ground truth s.
///  - trajectory: helix x = (cos s, sin s, 0.5 s) over s in [0, 3pi], one
///    uniform draw of s per equal-width stratum; ground truth is the arc
///    length s * sqrt(1.25).
/// `noise` adds gaussian jitter of that standard deviation to every coordinate.
inline Synthetic generate(const SyntheticSpec& spec) {
  if (spec.n < 4) throw Error(ErrorKind::InvalidSpec, "n=" + std::to_string(spec.n) + " must be >= 4");
  if (!(spec.noise >= 0.0)) throw Error(ErrorKind::InvalidSpec, "noise must be >= 0");
  Rng rng(spec.seed);
  const auto n = static_cast<Eigen::Index>(spec.n);
  std::vector<std::string> labels(spec.n);

  switch (spec.generator) {
    case Generator::SwissRoll: {
      Matrix X(n, 3), T(n, 2);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double t = rng.uniform(1.5 * std::numbers::pi, 4.5 * std::numbers::pi);
        const double h = rng.uniform(0.0, kSwissRollHeight);
        X.row(i) << t * std::cos(t), h, t * std::sin(t);
        T.row(i) << t, h;
        labels[static_cast<std::size_t>(i)] = detail::bin_label(t, 1.5 * std::numbers::pi, 4.5 * std::numbers::pi);
      }
      if (spec.noise > 0)
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = 0; j < 3; ++j) X(i, j) += spec.noise * rng.normal();
      return detail::assemble(std::move(X), std::move(T), std::move(labels));
    }
    case Generator::GaussianClusters: {
      if (spec.clusters < 2 || spec.clusters > spec.features)
        throw Error(ErrorKind::InvalidSpec, "clusters must be in [2, features]");
      const auto d = static_cast<Eigen::Index>(spec.features);
      Matrix X(n, d), T(n, 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto c = static_cast<Eigen::Index>(static_cast<std::size_t>(i) % spec.clusters);
        for (Eigen::Index j = 0; j < d; ++j)
          X(i, j) = (j == c ? 10.0 * kClusterSigma : 0.0) + kClusterSigma * rng.normal();
        T(i, 0) = static_cast<double>(c);
        labels[static_cast<std::size_t>(i)] = "cluster" + std::to_string(c);
      }
      if (spec.noise > 0)
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = 0; j < d; ++j) X(i, j) += spec.noise * rng.normal();
      return detail::assemble(std::move(X), std::move(T), std::move(labels));
    }
    case Generator::Line1d: {
      const Eigen::RowVector3d p0(1.0, -2.0, 0.5);
      const Eigen::RowVector3d u = Eigen::RowVector3d(1.0, 2.0, 2.0) / 3.0;
      Matrix X(n, 3), T(n, 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = rng.uniform(0.0, 10.0);
        X.row(i) = p0 + s * u;
        T(i, 0) = s;
        labels[static_cast<std::size_t>(i)] = detail::bin_label(s, 0.0, 10.0);
      }
      if (spec.noise > 0)
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = 0; j < 3; ++j) X(i, j) += spec.noise * rng.normal();
      return detail::assemble(std::move(X), std::move(T), std::move(labels));
    }
    case Generator::Trajectory: {
      const double smax = 3.0 * std::numbers::pi;
      const double speed = std::sqrt(1.25);
      Matrix X(n, 3), T(n, 1);
      // One draw per equal-width stratum, like samples along a time course.
      // Plain uniform draws leave gaps wide enough to cut the adaptive kernel.
      const double width = smax / static_cast<double>(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = width * (static_cast<double>(i) + rng.uniform());
        X.row(i) << std::cos(s), std::sin(s), 0.5 * s;
        T(i, 0) = s * speed;
        labels[static_cast<std::size_t>(i)] = detail::bin_label(s, 0.0, smax);
      }
      if (spec.noise > 0)
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = 0; j < 3; ++j) X(i, j) += spec.noise * rng.normal();
      return detail::assemble(std::move(X), std::move(T), std::move(labels));
    }
  }
  throw Error(ErrorKind::InvalidSpec, "unknown generator");
}

}  // namespace manifold::fixtures
