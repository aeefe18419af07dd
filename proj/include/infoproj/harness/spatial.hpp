// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Smoothness priors from a graph: precision = Laplacian + jitter * I.

#pragma once

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "infoproj/errors.hpp"

namespace infoproj {

using Edge = std::pair<int, int>;

inline Eigen::MatrixXd build_spatial_precision(int dim, const std::vector<Edge>& edges,
                                               double jitter) {
  if (dim <= 0) fail(ErrorKind::kInvalidArgument, "spatial prior: dim must be positive");
  if (!(jitter > 0)) fail(ErrorKind::kInvalidArgument, "spatial prior: jitter must be > 0");
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(dim, dim) * jitter;
  std::set<Edge> seen;
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= dim || b >= dim) {
      fail(ErrorKind::kInvalidArgument, "spatial prior: edge (" + std::to_string(a) + ", " +
                                            std::to_string(b) + ") out of range");
    }
    if (a == b) fail(ErrorKind::kInvalidArgument, "spatial prior: self-loop at " + std::to_string(a));
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second) {
      fail(ErrorKind::kInvalidArgument, "spatial prior: duplicate edge (" + std::to_string(a) +
                                            ", " + std::to_string(b) + ")");
    }
    p(a, a) += 1.0;
    p(b, b) += 1.0;
    p(a, b) -= 1.0;
    p(b, a) -= 1.0;
  }
  return p;
}

// 4-neighbour grid, node id = row * cols + col.
inline std::vector<Edge> grid_edges(int rows, int cols) {
  std::vector<Edge> out;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) out.emplace_back(r * cols + c, r * cols + c + 1);
      if (r + 1 < rows) out.emplace_back(r * cols + c, (r + 1) * cols + c);
    }
  return out;
}

}  // namespace infoproj
