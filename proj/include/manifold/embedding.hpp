#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "manifold/dataset.hpp"
#include "manifold/error.hpp"

namespace manifold {

/// Low-dimensional output coordinates plus provenance. Rows align with `ids`.
struct Embedding {
  Matrix coords;
  std::string algorithm;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> ids;

  std::size_t n() const { return static_cast<std::size_t>(coords.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(coords.cols()); }
};

inline void check_finite(const Embedding& e) {
  if (!e.coords.allFinite())
    throw Error(ErrorKind::NumericalOverflow, "algorithm=" + e.algorithm + " non-finite coordinates");
}

}  // namespace manifold
