#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manifold/embedding.hpp"
#include "manifold/geodesic.hpp"
#include "manifold/linalg.hpp"
#include "manifold/neighbors.hpp"
#include "manifold/parallel.hpp"

namespace manifold {

/// Row-stochastic diffusion operator P = Dg^{-1} W together with the
/// eigenvalues of its symmetric conjugate Dg^{-1/2} W Dg^{-1/2}, which
/// share P's spectrum. Powers P^t are cached on demand.
class DiffusionOperator {
 public:
  DiffusionOperator(Matrix op, Vector spectrum) : op_(std::move(op)), spectrum_(std::move(spectrum)) {}

  const Matrix& matrix() const { return op_; }
  /// Eigenvalues, ascending.
  const Vector& spectrum() const { return spectrum_; }
  std::size_t n() const { return static_cast<std::size_t>(op_.rows()); }

  /// P^t by repeated multiplication, reusing the largest cached lower power.
  const Matrix& power(std::size_t t) const {
    if (t < 1) throw Error(ErrorKind::Config, "t must be >= 1");
    if (powers_.empty()) powers_.emplace(1, op_);
    if (auto it = powers_.find(t); it != powers_.end()) return it->second;
    auto base = std::prev(powers_.lower_bound(t));
    Matrix cur = base->second;
    for (std::size_t s = base->first + 1; s <= t; ++s) {
      cur = multiply(cur, op_);
      powers_.emplace(s, cur);
    }
    return powers_.at(t);
  }

 private:
  // Row-blocked product; each output row is produced by exactly one worker.
  static Matrix multiply(const Matrix& A, const Matrix& B) {
    Matrix C(A.rows(), B.cols());
    parallel_for(static_cast<std::size_t>(A.rows()), [&](std::size_t i) {
      const auto r = static_cast<Eigen::Index>(i);
      C.row(r).noalias() = A.row(r) * B;
    });
    return C;
  }

  Matrix op_;
  Vector spectrum_;
  mutable std::map<std::size_t, Matrix> powers_;
};

inline DiffusionOperator diffusion_operator(const AffinityMatrix& W) {
  const Vector degree = W.weights.rowwise().sum();
  for (Eigen::Index i = 0; i < degree.size(); ++i)
    if (!(degree[i] > 0.0)) throw Error(ErrorKind::ZeroRowSum, "row=" + std::to_string(i));
  Matrix P = degree.cwiseInverse().asDiagonal() * W.weights;
  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd A = inv_sqrt.asDiagonal() * W.weights * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "diffusion spectrum");
  return DiffusionOperator(std::move(P), solver.eigenvalues());
}

/// Spectral entropy H(t) = -sum eta_i log eta_i, eta_i proportional to |lambda_i|^t,
/// skipping zero eigenvalues. Index 0 of the result is t = 1.
inline std::vector<double> von_neumann_entropy(const Vector& spectrum, std::size_t t_max) {
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i)
    if (std::abs(spectrum[i]) > 0.0) mags.push_back(std::abs(spectrum[i]));
  std::vector<double> H;
  H.reserve(t_max);
  for (std::size_t t = 1; t <= t_max; ++t) {
    // Normalize by the largest magnitude before powering to avoid underflow.
    const double top = *std::max_element(mags.begin(), mags.end());
    double sum = 0.0;
    std::vector<double> eta(mags.size());
    for (std::size_t i = 0; i < mags.size(); ++i) {
      eta[i] = std::pow(mags[i] / top, static_cast<double>(t));
      sum += eta[i];
    }
    double h = 0.0;
    for (double e : eta) {
      const double p = e / sum;
      if (p > 0.0) h -= p * std::log(p);
    }
    H.push_back(h);
  }
  return H;
}

/// Index (1-based t) of the point of `curve` farthest from the chord joining
/// its first and last points. Ties go to the smaller t.
inline std::size_t find_knee(const std::vector<double>& curve) {
  const std::size_t T = curve.size();
  if (T < 2) return 1;
  const double x0 = 1.0, y0 = curve.front();
  const double x1 = static_cast<double>(T), y1 = curve.back();
  const double dx = x1 - x0, dy = y1 - y0;
  const double len = std::hypot(dx, dy);
  std::size_t best = 1;
  double best_d = -1.0;
  for (std::size_t t = 1; t <= T; ++t) {
    const double x = static_cast<double>(t), y = curve[t - 1];
    const double d = std::abs(dy * (x - x0) - dx * (y - y0)) / len;
    if (d > best_d) {
      best_d = d;
      best = t;
    }
  }
  return best;
}

/// Diffusion time chosen at the knee of the spectral entropy curve over 1..t_max.
inline std::size_t select_t(const DiffusionOperator& op, std::size_t t_max) {
  if (t_max < 2) throw Error(ErrorKind::Config, "t_max=" + std::to_string(t_max) + " must be >= 2");
  const Vector& s = op.spectrum();
  std::size_t nonzero = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (std::abs(s[i]) > 1e-12) ++nonzero;
  if (nonzero <= 1) throw Error(ErrorKind::DegenerateSpectrum, "nonzero eigenvalues=" + std::to_string(nonzero));
  return find_knee(von_neumann_entropy(s, t_max));
}

/// Log-floor inside the potential transform.
inline constexpr double kPotentialEpsilon = 1e-7;

/// d(i,j) = || U_i - U_j ||_2 with U = -log(P^t + 1e-7).
inline DistanceMatrix potential_distances(const DiffusionOperator& op, std::size_t t) {
  const Matrix& Pt = op.power(t);
  const Matrix U = -(Pt.array() + kPotentialEpsilon).log().matrix();
  return pairwise_distances(U, Metric::Euclidean);
}

struct PhateOptions {
  std::size_t k = 5;
  double alpha = 40.0;
  std::size_t dim = 2;
  std::optional<std::size_t> t;  // automatic when empty
  std::size_t t_max = 100;
  std::size_t smacof_iters = 300;
  double smacof_eps = 1e-6;
  std::uint64_t seed = 0;
  Metric metric = Metric::Euclidean;
};

struct PhateResult {
  Embedding embedding;
  std::size_t t = 0;
  std::vector<double> entropy;  // H(1..t_max); empty when t was given
  std::vector<double> stress;
};

/// Distances -> kNN -> alpha-decay kernel -> diffusion operator -> t ->
/// potential distances -> SMACOF started from classical MDS.
inline PhateResult phate_embed(const Matrix& X, const PhateOptions& opt) {
  const auto D = pairwise_distances(X, opt.metric);
  const auto knn = knn_graph(D, opt.k);
  const auto op = diffusion_operator(alpha_decay_kernel(D, knn, opt.alpha));

  PhateResult res;
  if (opt.t) {
    res.t = *opt.t;
  } else {
    select_t(op, opt.t_max);  // validates the spectrum
    res.entropy = von_neumann_entropy(op.spectrum(), opt.t_max);
    res.t = find_knee(res.entropy);
  }
  const auto pd = potential_distances(op, res.t);
  const auto init = classical_mds(pd, opt.dim);
  auto sm = smacof_mds(pd.values(), init.coords, {opt.smacof_iters, opt.smacof_eps, opt.seed});
  res.stress = std::move(sm.stress);
  res.embedding = std::move(sm.embedding);
  res.embedding.algorithm = "phate";
  res.embedding.seed = opt.seed;
  res.embedding.params = {{"k", opt.k},          {"alpha", opt.alpha},
                          {"dim", opt.dim},      {"t", res.t},
                          {"t_auto", !opt.t},    {"t_max", opt.t_max},
                          {"smacof_iters", opt.smacof_iters}, {"smacof_eps", opt.smacof_eps}};
  return res;
}

}  // namespace manifold
