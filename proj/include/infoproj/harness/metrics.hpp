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

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "infoproj/errors.hpp"
#include "infoproj/solvers.hpp"

namespace infoproj {

inline constexpr double kStrongEvidenceLogBF = 2.302585092994045684;  // ln 10

// 1 - SS_res / SS_tot.
inline double metric_r2(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size() || y_true.size() == 0) {
    fail(ErrorKind::kDimensionMismatch, "r2: vectors must be non-empty and of equal length");
  }
  const double ss_tot = (y_true.array() - y_true.mean()).square().sum();
  if (!(ss_tot > 0)) fail(ErrorKind::kDegenerate, "r2: truth has zero variance");
  return 1.0 - (y_true - y_pred).squaredNorm() / ss_tot;
}

// Mann-Whitney AUC of scores for the positives against the negatives, ties at
// midrank.
inline double metric_support_auc(const std::vector<bool>& truth, const Eigen::VectorXd& scores) {
  if (static_cast<Eigen::Index>(truth.size()) != scores.size()) {
    fail(ErrorKind::kDimensionMismatch, "auc: truth and scores differ in length");
  }
  const std::size_t n = truth.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[static_cast<Eigen::Index>(a)] < scores[static_cast<Eigen::Index>(b)];
  });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[static_cast<Eigen::Index>(order[j])] ==
                        scores[static_cast<Eigen::Index>(order[i])]) {
      ++j;
    }
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (truth[order[k]]) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    fail(ErrorKind::kDegenerate, "auc: truth must contain both classes");
  }
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1) / 2) / (p * static_cast<double>(negatives));
}

// v^T T^T T v / |T|_F^2 for the unit vector along `factor`.
inline double metric_variance_explained(const Eigen::MatrixXd& t, const Eigen::VectorXd& factor) {
  if (factor.size() != t.cols()) {
    fail(ErrorKind::kDimensionMismatch, "variance explained: factor length != columns");
  }
  const double norm = factor.norm();
  if (!(norm > 0)) fail(ErrorKind::kDegenerate, "variance explained: zero factor");
  const double total = t.squaredNorm();
  if (!(total > 0)) fail(ErrorKind::kDegenerate, "variance explained: zero data");
  return (t * (factor / norm)).squaredNorm() / total;
}

// u^T X^T Y v / (|X u| |Y v|).
inline double metric_cross_variance(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                    const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (x.rows() != y.rows() || x.cols() != u.size() || y.cols() != v.size()) {
    fail(ErrorKind::kDimensionMismatch, "cross variance: inconsistent shapes");
  }
  const Eigen::VectorXd xu = x * u, yv = y * v;
  const double denom = xu.norm() * yv.norm();
  if (!(denom > 0)) fail(ErrorKind::kDegenerate, "cross variance: zero denominator");
  return xu.dot(yv) / denom;
}

// u^T X^T Y v / (|u^T X u| |v^T Y v|), defined only for square X and Y.
inline double metric_cross_variance_literal(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                            const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (x.rows() != x.cols() || y.rows() != y.cols()) {
    fail(ErrorKind::kDimensionMismatch,
         "literal cross variance needs square X and Y (u^T X u is otherwise undefined)");
  }
  if (x.rows() != y.rows() || x.cols() != u.size() || y.cols() != v.size()) {
    fail(ErrorKind::kDimensionMismatch, "cross variance: inconsistent shapes");
  }
  const double denom = std::abs(u.dot(x * u)) * std::abs(v.dot(y * v));
  if (!(denom > 0)) fail(ErrorKind::kDegenerate, "cross variance: zero denominator");
  return (x * u).dot(y * v) / denom;
}

// Number of leading greedy steps to keep: the last step whose marginal gain,
// read as a log Bayes factor of the expanded support against the current
// one, exceeds `threshold`.
inline int estimate_k_bayes_factor(std::span<const SelectionStep> trace,
                                   double threshold = kStrongEvidenceLogBF) {
  if (trace.empty()) fail(ErrorKind::kInvalidArgument, "estimate k: empty trace");
  int k = 0;
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (trace[i].gain > threshold) k = static_cast<int>(i + 1);
  return k;
}

}  // namespace infoproj
