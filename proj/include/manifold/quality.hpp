#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "manifold/dataset.hpp"
#include "manifold/error.hpp"
#include "manifold/neighbors.hpp"
#include "manifold/parallel.hpp"

namespace manifold {

namespace detail {

/// Indices of all other points ordered by (distance, index) from point i.
inline std::vector<std::size_t> neighbor_order(const Matrix& P, Eigen::Index i) {
  const auto n = static_cast<std::size_t>(P.rows());
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = (P.row(i) - P.row(static_cast<Eigen::Index>(j))).squaredNorm();
  std::vector<std::size_t> order;
  order.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    if (j != static_cast<std::size_t>(i)) order.push_back(j);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  return order;
}

inline void check_trust_k(std::size_t n, std::size_t k) {
  if (k < 1 || 2 * k >= n) throw Error(ErrorKind::KTooLarge, "k=" + std::to_string(k) + " n=" + std::to_string(n));
}

}  // namespace detail

/// Trustworthiness of embedding Y with respect to the original points X:
///   1 - 2/(n k (2n - 3k - 1)) * sum_i sum_{j in U_i} (r(i,j) - k)
/// where U_i holds Y-neighbors of i that are not X-neighbors and r(i,j) is
/// the 1-based rank of j among i's neighbors in X. Ties break by index.
inline double trustworthiness(const Matrix& X, const Matrix& Y, std::size_t k) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (static_cast<std::size_t>(Y.rows()) != n)
    throw Error(ErrorKind::ShapeMismatch, "X rows=" + std::to_string(n) + " Y rows=" + std::to_string(Y.rows()));
  detail::check_trust_k(n, k);
  std::vector<double> penalty(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const auto ox = detail::neighbor_order(X, static_cast<Eigen::Index>(i));
    const auto oy = detail::neighbor_order(Y, static_cast<Eigen::Index>(i));
    std::vector<std::size_t> rank(n, 0);
    for (std::size_t r = 0; r < ox.size(); ++r) rank[ox[r]] = r + 1;
    double p = 0.0;
    for (std::size_t a = 0; a < k; ++a)
      if (rank[oy[a]] > k) p += static_cast<double>(rank[oy[a]] - k);
    penalty[i] = p;
  });
  const double total = std::accumulate(penalty.begin(), penalty.end(), 0.0);
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  return 1.0 - 2.0 / (nn * kk * (2.0 * nn - 3.0 * kk - 1.0)) * total;
}

/// Continuity: trustworthiness with the roles of X and Y exchanged, so true
/// neighbors missing from the embedding are penalized by their Y rank.
inline double continuity(const Matrix& X, const Matrix& Y, std::size_t k) { return trustworthiness(Y, X, k); }

/// Mean fraction of each point's k nearest embedding neighbors sharing its label.
inline double knn_label_agreement(const Matrix& Y, const std::vector<std::string>& labels, std::size_t k) {
  const auto n = static_cast<std::size_t>(Y.rows());
  if (labels.size() != n) throw Error(ErrorKind::ShapeMismatch, "labels do not align with embedding rows");
  if (k < 1 || k + 1 > n) throw Error(ErrorKind::KTooLarge, "k=" + std::to_string(k) + " n=" + std::to_string(n));
  if (std::all_of(labels.begin(), labels.end(), [&](const std::string& l) { return l == labels.front(); })) {
    warn("knn_label_agreement: single class, returning 1.0");
    return 1.0;
  }
  std::vector<double> frac(n);
  parallel_for(n, [&](std::size_t i) {
    const auto order = detail::neighbor_order(Y, static_cast<Eigen::Index>(i));
    std::size_t same = 0;
    for (std::size_t a = 0; a < k; ++a)
      if (labels[order[a]] == labels[i]) ++same;
    frac[i] = static_cast<double>(same) / static_cast<double>(k);
  });
  return std::accumulate(frac.begin(), frac.end(), 0.0) / static_cast<double>(n);
}

/// Mean silhouette over points. Points in singleton classes score 0, and
/// a 0/0 ratio (a = b = 0) scores 0.
inline double silhouette(const Matrix& Y, const std::vector<std::string>& labels) {
  const auto n = static_cast<std::size_t>(Y.rows());
  if (labels.size() != n) throw Error(ErrorKind::ShapeMismatch, "labels do not align with embedding rows");
  std::map<std::string, std::size_t> class_index;
  for (const auto& l : labels) class_index.emplace(l, 0);
  if (class_index.size() < 2) throw Error(ErrorKind::SingleClass, "classes=" + std::to_string(class_index.size()));
  std::size_t c = 0;
  for (auto& [l, idx] : class_index) idx = c++;
  std::vector<std::size_t> cls(n), size(c, 0);
  for (std::size_t i = 0; i < n; ++i) {
    cls[i] = class_index[labels[i]];
    ++size[cls[i]];
  }
  std::vector<double> score(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    if (size[cls[i]] < 2) return;
    std::vector<double> sum(c, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) sum[cls[j]] += (Y.row(static_cast<Eigen::Index>(i)) - Y.row(static_cast<Eigen::Index>(j))).norm();
    const double a = sum[cls[i]] / static_cast<double>(size[cls[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < c; ++q)
      if (q != cls[i]) b = std::min(b, sum[q] / static_cast<double>(size[q]));
    const double den = std::max(a, b);
    score[i] = den > 0.0 ? (b - a) / den : 0.0;
  });
  return std::accumulate(score.begin(), score.end(), 0.0) / static_cast<double>(n);
}

struct QualityReport {
  double trustworthiness = 0.0;
  double continuity = 0.0;
  double knn_label_agreement = 0.0;
  double silhouette = 0.0;
  std::size_t k = 0;
  std::string label_column;
  std::size_t n_samples = 0;
  std::size_t n_labels = 0;
};

/// Silhouette falls back to 0 (with a warning) for single-class labelings so
/// a report can always be produced.
inline QualityReport evaluate(const Matrix& X, const Matrix& Y, const std::vector<std::string>& labels,
                              std::size_t k, const std::string& label_column) {
  QualityReport r;
  r.k = k;
  r.label_column = label_column;
  r.n_samples = static_cast<std::size_t>(Y.rows());
  r.n_labels = std::set<std::string>(labels.begin(), labels.end()).size();
  r.trustworthiness = trustworthiness(X, Y, k);
  r.continuity = continuity(X, Y, k);
  r.knn_label_agreement = knn_label_agreement(Y, labels, k);
  if (r.n_labels >= 2) {
    r.silhouette = silhouette(Y, labels);
  } else {
    warn("silhouette: single class, reporting 0");
    r.silhouette = 0.0;
  }
  return r;
}

inline nlohmann::ordered_json to_json(const QualityReport& r) {
  return {{"trustworthiness", r.trustworthiness},
          {"continuity", r.continuity},
          {"knn_label_agreement", r.knn_label_agreement},
          {"silhouette", r.silhouette},
          {"k", r.k},
          {"label_column", r.label_column},
          {"n_samples", r.n_samples},
          {"n_labels", r.n_labels}};
}

/// Inverse of to_json; throws FormatError when a field is missing, has the
/// wrong type, or is out of range.
inline QualityReport quality_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) { return Error(ErrorKind::Format, "quality report: " + what); };
  if (!j.is_object()) throw fail("not an object");
  auto num = [&](const char* key, double lo, double hi) {
    if (!j.contains(key) || !j[key].is_number()) throw fail(std::string("missing number '") + key + "'");
    const double v = j[key].get<double>();
    if (!(v >= lo && v <= hi)) throw fail(std::string("'") + key + "' out of range");
    return v;
  };
  auto count = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number_unsigned()) throw fail(std::string("missing count '") + key + "'");
    return j[key].get<std::size_t>();
  };
  QualityReport r;
  r.trustworthiness = num("trustworthiness", 0.0, 1.0);
  r.continuity = num("continuity", 0.0, 1.0);
  r.knn_label_agreement = num("knn_label_agreement", 0.0, 1.0);
  r.silhouette = num("silhouette", -1.0, 1.0);
  r.k = count("k");
  r.n_samples = count("n_samples");
  r.n_labels = count("n_labels");
  if (!j.contains("label_column") || !j["label_column"].is_string()) throw fail("missing string 'label_column'");
  r.label_column = j["label_column"].get<std::string>();
  return r;
}

namespace detail {
inline std::string fixed(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}
}  // namespace detail

/// Aligned two-column plain-text table.
inline std::string to_text(const QualityReport& r) {
  std::ostringstream out;
  auto line = [&](const std::string& key, const std::string& val) {
    out << key << std::string(22 - key.size(), ' ') << val << '\n';
  };
  line("metric", "value");
  line("trustworthiness", detail::fixed(r.trustworthiness));
  line("continuity", detail::fixed(r.continuity));
  line("knn_label_agreement", detail::fixed(r.knn_label_agreement));
  line("silhouette", detail::fixed(r.silhouette));
  line("k", std::to_string(r.k));
  line("label_column", r.label_column);
  line("n_samples", std::to_string(r.n_samples));
  line("n_labels", std::to_string(r.n_labels));
  return out.str();
}

}  // namespace manifold
