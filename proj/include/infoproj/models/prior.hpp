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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infoproj/errors.hpp"
#include "infoproj/gaussian.hpp"

namespace infoproj {

// Zero-mean Gaussian prior N(0, P^-1) held by its precision P.
class GaussianPrior {
 public:
  GaussianPrior() = default;

  static GaussianPrior from_precision(Eigen::MatrixXd precision,
                                      const std::string& label = "prior") {
    GaussianPrior out;
    const Eigen::Index d = precision.rows();
    const GaussianDensity check(std::move(precision), Eigen::VectorXd::Zero(d), 0.0, label);
    out.precision_ = check.precision();
    out.log_det_ = check.log_det_precision();
    return out;
  }

  static GaussianPrior from_covariance(const Eigen::MatrixXd& covariance,
                                       const std::string& label = "prior") {
    if (covariance.rows() == 0 || covariance.rows() != covariance.cols()) {
      fail(ErrorKind::kDimensionMismatch, label + ": covariance must be non-empty and square");
    }
    if (!detail::is_symmetric(covariance, kSymmetryTolerance)) {
      fail(ErrorKind::kNotPositiveDefinite, label + ": covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
      fail(ErrorKind::kNotPositiveDefinite, label + ": covariance is singular or indefinite");
    }
    Eigen::MatrixXd p = llt.solve(Eigen::MatrixXd::Identity(covariance.rows(), covariance.cols()));
    return from_precision(0.5 * (p + p.transpose()), label);
  }

  static GaussianPrior isotropic(int dim, double variance = 1.0) {
    if (dim <= 0 || !(variance > 0)) {
      fail(ErrorKind::kInvalidArgument, "isotropic prior needs dim > 0 and variance > 0");
    }
    return from_precision(Eigen::MatrixXd::Identity(dim, dim) / variance);
  }

  static GaussianPrior block_diagonal(const std::vector<GaussianPrior>& blocks) {
    Eigen::Index total = 0;
    for (const auto& b : blocks) total += b.dim();
    if (total == 0) fail(ErrorKind::kInvalidArgument, "block_diagonal: no blocks");
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(total, total);
    Eigen::Index at = 0;
    double log_det = 0.0;
    for (const auto& b : blocks) {
      p.block(at, at, b.dim(), b.dim()) = b.precision();
      at += b.dim();
      log_det += b.log_det_precision();
    }
    GaussianPrior out;
    out.precision_ = std::move(p);
    out.log_det_ = log_det;
    return out;
  }

  int dim() const noexcept { return static_cast<int>(precision_.rows()); }
  const Eigen::MatrixXd& precision() const noexcept { return precision_; }
  double log_det_precision() const noexcept { return log_det_; }

 private:
  Eigen::MatrixXd precision_;
  double log_det_ = 0.0;
};

}  // namespace infoproj
