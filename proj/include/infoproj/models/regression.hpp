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

// Bayesian linear regression y = Z beta + noise with a Gaussian prior on beta,
// followed by group-sparse projection of the posterior.

#pragma once

#include <string>

#include <Eigen/Dense>

#include "infoproj/constraints.hpp"
#include "infoproj/gaussian.hpp"
#include "infoproj/models/prior.hpp"
#include "infoproj/objective.hpp"
#include "infoproj/solvers.hpp"

namespace infoproj {

struct RegressionModel {
  Eigen::MatrixXd Z;  // n x d
  Eigen::VectorXd y;  // n
  GaussianPrior prior;
  double sigma2 = 1.0;
  GroupStructure groups;
  int budget = 0;

  void validate() const {
    if (Z.rows() != y.size()) {
      fail(ErrorKind::kDimensionMismatch,
           "regression: Z has " + std::to_string(Z.rows()) + " rows but y has " +
               std::to_string(y.size()) + " entries");
    }
    if (prior.dim() != Z.cols()) {
      fail(ErrorKind::kDimensionMismatch, "regression: prior dimension does not match Z");
    }
    if (groups.dim() != Z.cols()) {
      fail(ErrorKind::kDimensionMismatch, "regression: group dimension does not match Z");
    }
    if (!(sigma2 > 0) || !std::isfinite(sigma2)) {
      fail(ErrorKind::kInvalidArgument, "regression: sigma2 must be positive");
    }
    if (budget < 0) fail(ErrorKind::kInvalidArgument, "regression: negative budget");
    if (!Z.allFinite() || !y.allFinite()) {
      fail(ErrorKind::kInvalidArgument, "regression: non-finite data");
    }
  }
};

// Lambda = P + Z^T Z / sigma2, r = Z^T y / sigma2.
inline GaussianDensity regression_posterior(const RegressionModel& m) {
  m.validate();
  Eigen::MatrixXd precision = m.prior.precision();
  precision.selfadjointView<Eigen::Lower>().rankUpdate(m.Z.transpose(), 1.0 / m.sigma2);
  precision.triangularView<Eigen::StrictlyUpper>() = precision.transpose();
  Eigen::VectorXd potential = m.Z.transpose() * m.y / m.sigma2;
  return GaussianDensity(std::move(precision), std::move(potential), 0.0,
                         "regression posterior");
}

struct RegressionSelection {
  SelectionResult selection;  // group ids
  SupportSet support;         // expanded coordinates
  ProjectedDensity projected;
};

inline RegressionSelection select_groups_regression(const RegressionModel& m,
                                                    const PartialEnumOptions& opt = {}) {
  GaussianDensity posterior = regression_posterior(m);
  const GroupGaussianObjective f(posterior, m.groups);
  RegressionSelection out;
  out.selection = greedy_partial_enum(f, m.groups, m.budget, opt);
  out.support = expand_groups(m.groups, out.selection.selected);
  out.projected = project_onto(posterior, out.support);
  return out;
}

inline Eigen::VectorXd predict(const ProjectedDensity& q, const Eigen::MatrixXd& Z) {
  if (Z.cols() != q.mean.size()) {
    fail(ErrorKind::kDimensionMismatch, "predict: feature count does not match the model");
  }
  return Z * q.mean;
}

}  // namespace infoproj
