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

// Planted group-sparse regression data.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "infoproj/constraints.hpp"
#include "infoproj/harness/rng.hpp"

namespace infoproj {

enum class Split : int { kTrain = 0, kValidation = 1, kTest = 2 };

struct SyntheticRegression {
  Eigen::MatrixXd Z;
  Eigen::VectorXd y;
  Eigen::VectorXd beta;
  GroupStructure groups;
  std::vector<int> planted;  // sorted group ids carrying signal
  std::vector<int> split;    // Split per row
  double sigma2 = 0.0;
};

struct SyntheticSpec {
  int d = 1000;
  int n = 1000;
  int num_groups = 5;  // planted
  int group_size = 4;
  double snr = 10000.0;
  std::uint64_t seed = 0;
};

// Z has iid N(0, 1) entries and the coordinates are cut into consecutive
// blocks of group_size. num_groups blocks drawn by the seed carry
// coefficients sign * U[0.5, 1.5]. The noise variance is |beta|^2 / snr, the
// signal variance under identity feature covariance. Rows are shuffled into
// 50/10/40 train/validation/test.
inline SyntheticRegression gen_synthetic_regression(const SyntheticSpec& spec) {
  if (spec.d <= 0 || spec.n <= 0 || spec.group_size <= 0 || spec.num_groups < 0) {
    fail(ErrorKind::kInvalidArgument, "synthetic: sizes must be positive");
  }
  if (spec.num_groups * spec.group_size > spec.d) {
    fail(ErrorKind::kInvalidArgument, "synthetic: planted groups need " +
                                          std::to_string(spec.num_groups * spec.group_size) +
                                          " coordinates but d = " + std::to_string(spec.d));
  }
  if (!(spec.snr > 0) || !std::isfinite(spec.snr)) {
    fail(ErrorKind::kInvalidArgument, "synthetic: snr must be positive and finite");
  }
  SyntheticRegression out;
  out.groups = GroupStructure::uniform_blocks(spec.d, spec.group_size);
  std::vector<int> full;
  for (int g = 0; g < out.groups.num_groups(); ++g) {
    if (out.groups.group(g).size() == spec.group_size) full.push_back(g);
  }
  auto planted_rng = make_stream(spec.seed, Stream::kPlanted);
  std::shuffle(full.begin(), full.end(), planted_rng);
  out.planted.assign(full.begin(), full.begin() + spec.num_groups);
  std::sort(out.planted.begin(), out.planted.end());

  auto coef_rng = make_stream(spec.seed, Stream::kCoefficients);
  std::uniform_real_distribution<double> magnitude(0.5, 1.5);
  std::bernoulli_distribution sign;
  out.beta = Eigen::VectorXd::Zero(spec.d);
  for (int g : out.planted) {
    for (int i : out.groups.group(g)) out.beta[i] = (sign(coef_rng) ? 1.0 : -1.0) * magnitude(coef_rng);
  }

  auto design_rng = make_stream(spec.seed, Stream::kDesign);
  std::normal_distribution<double> normal;
  out.Z.resize(spec.n, spec.d);
  for (Eigen::Index r = 0; r < spec.n; ++r)
    for (Eigen::Index c = 0; c < spec.d; ++c) out.Z(r, c) = normal(design_rng);

  out.sigma2 = out.beta.squaredNorm() / spec.snr;
  auto noise_rng = make_stream(spec.seed, Stream::kNoise);
  out.y = out.Z * out.beta;
  const double sd = std::sqrt(out.sigma2);
  for (Eigen::Index r = 0; r < spec.n; ++r) out.y[r] += sd * normal(noise_rng);

  std::vector<int> order(static_cast<std::size_t>(spec.n));
  std::iota(order.begin(), order.end(), 0);
  auto split_rng = make_stream(spec.seed, Stream::kSplit);
  std::shuffle(order.begin(), order.end(), split_rng);
  const int n_train = spec.n / 2;
  const int n_val = spec.n / 10;
  out.split.assign(static_cast<std::size_t>(spec.n), static_cast<int>(Split::kTest));
  for (int i = 0; i < spec.n; ++i) {
    const int row = order[static_cast<std::size_t>(i)];
    if (i < n_train) {
      out.split[static_cast<std::size_t>(row)] = static_cast<int>(Split::kTrain);
    } else if (i < n_train + n_val) {
      out.split[static_cast<std::size_t>(row)] = static_cast<int>(Split::kValidation);
    }
  }
  return out;
}

inline std::vector<int> rows_in(const std::vector<int>& split, Split which) {
  std::vector<int> rows;
  for (std::size_t i = 0; i < split.size(); ++i)
    if (split[i] == static_cast<int>(which)) rows.push_back(static_cast<int>(i));
  return rows;
}

}  // namespace infoproj
