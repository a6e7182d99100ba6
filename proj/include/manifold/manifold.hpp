#pragma once

#include "manifold/dataset.hpp"
#include "manifold/embedding.hpp"
#include "manifold/error.hpp"
#include "manifold/fixtures.hpp"
#include "manifold/geodesic.hpp"
#include "manifold/linalg.hpp"
#include "manifold/neighbors.hpp"
#include "manifold/phate.hpp"
#include "manifold/quality.hpp"
#include "manifold/rng.hpp"
#include "manifold/spectral.hpp"
#include "manifold/tsne.hpp"
