#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "manifold/dataset.hpp"
#include "oracles.hpp"

namespace testing_support {

inline oracle::Points to_points(const manifold::Matrix& M) {
  oracle::Points p(static_cast<std::size_t>(M.rows()), std::vector<double>(static_cast<std::size_t>(M.cols())));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = M(i, j);
  return p;
}

inline manifold::Matrix to_matrix(const oracle::Points& p) {
  manifold::Matrix M(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(p.empty() ? 0 : p[0].size()));
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p[i].size(); ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p[i][j];
  return M;
}

inline std::vector<double> column(const manifold::Matrix& M, Eigen::Index c) {
  std::vector<double> v(static_cast<std::size_t>(M.rows()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) v[static_cast<std::size_t>(i)] = M(i, c);
  return v;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("manifold_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace testing_support
