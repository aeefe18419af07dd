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

// Gaussian densities in precision form, closed-form relative entropy, and
// the restriction of a density to a coordinate support.
//
// A density p = N(mu, Sigma) is stored as (Lambda, r) with Lambda = Sigma^-1
// and r = Lambda mu. Restricting p to a support S (all other coordinates
// pinned at zero) keeps the principal block Lambda_S and the subvector r_S,
// so every quantity used by support selection indexes into (Lambda, r).

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "infoproj/errors.hpp"
#include "infoproj/support.hpp"

namespace infoproj {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2 pi)
inline constexpr double kSymmetryTolerance = 1e-10;

// Sum of log diagonal of a Cholesky factor, doubled: log det of LL^T.
inline double log_det_from_cholesky(const Eigen::MatrixXd& lower) {
  return 2.0 * lower.diagonal().array().log().sum();
}

namespace detail {

// Relative element-wise symmetry check. Entries at round-off scale relative
// to the largest magnitude in the matrix are compared absolutely.
inline bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double floor = 1e-14 * m.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
      const double a = m(i, j);
      const double b = m(j, i);
      const double diff = std::abs(a - b);
      if (diff > tol * std::max(std::abs(a), std::abs(b)) && diff > floor) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace detail

// Multivariate normal in information (precision) form. Immutable after
// construction, so instances can be shared across threads.
class GaussianDensity {
 public:
  // `jitter` is added to the diagonal before the positive-definiteness check.
  // `label` names the argument in error messages.
  GaussianDensity(Eigen::MatrixXd precision, Eigen::VectorXd potential,
                  double jitter = 0.0, const std::string& label = "density")
      : precision_(std::move(precision)), potential_(std::move(potential)) {
    if (precision_.rows() == 0 || precision_.rows() != precision_.cols()) {
      fail(ErrorKind::kDimensionMismatch,
           label + ": precision must be a non-empty square matrix");
    }
    if (potential_.size() != precision_.rows()) {
      fail(ErrorKind::kDimensionMismatch,
           label + ": potential has length " + std::to_string(potential_.size()) +
               ", expected " + std::to_string(precision_.rows()));
    }
    if (!precision_.allFinite() || !potential_.allFinite()) {
      fail(ErrorKind::kInvalidArgument, label + ": non-finite parameters");
    }
    if (!detail::is_symmetric(precision_, kSymmetryTolerance)) {
      fail(ErrorKind::kNotPositiveDefinite, label + ": precision is not symmetric");
    }
    precision_ = 0.5 * (precision_ + precision_.transpose()).eval();
    if (jitter != 0.0) precision_.diagonal().array() += jitter;
    chol_.compute(precision_);
    if (chol_.info() != Eigen::Success) {
      fail(ErrorKind::kNotPositiveDefinite,
           label + ": precision is not positive definite");
    }
    const Eigen::MatrixXd lower = chol_.matrixL();
    log_det_ = log_det_from_cholesky(lower);
    whitened_ = chol_.matrixL().solve(potential_);
  }

  static GaussianDensity from_moments(const Eigen::VectorXd& mean,
                                      const Eigen::MatrixXd& covariance,
                                      const std::string& label = "density") {
    if (covariance.rows() != mean.size() || covariance.cols() != mean.size()) {
      fail(ErrorKind::kDimensionMismatch, label + ": covariance/mean shape mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
      fail(ErrorKind::kNotPositiveDefinite,
           label + ": covariance is not positive definite");
    }
    const Eigen::Index d = mean.size();
    Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(d, d));
    Eigen::VectorXd potential = precision * mean;
    return GaussianDensity(0.5 * (precision + precision.transpose()), potential,
                           0.0, label);
  }

  int dim() const noexcept { return static_cast<int>(precision_.rows()); }
  const Eigen::MatrixXd& precision() const noexcept { return precision_; }
  const Eigen::VectorXd& potential() const noexcept { return potential_; }
  const Eigen::LLT<Eigen::MatrixXd>& cholesky() const noexcept { return chol_; }

  double log_det_precision() const noexcept { return log_det_; }

  // r^T Lambda^-1 r = mu^T Lambda mu.
  double potential_quadratic() const noexcept { return whitened_.squaredNorm(); }

  Eigen::VectorXd mean() const { return chol_.solve(potential_); }

  Eigen::MatrixXd covariance() const {
    return chol_.solve(Eigen::MatrixXd::Identity(dim(), dim()));
  }

  double log_density(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) {
      fail(ErrorKind::kDimensionMismatch, "log_density: point has wrong dimension");
    }
    const Eigen::VectorXd diff = x - mean();
    return 0.5 * log_det_ - 0.5 * dim() * kLog2Pi -
           0.5 * diff.dot(precision_ * diff);
  }

  // log p(0) without forming the mean.
  double log_density_at_origin() const noexcept {
    return 0.5 * log_det_ - 0.5 * dim() * kLog2Pi - 0.5 * potential_quadratic();
  }

 private:
  Eigen::MatrixXd precision_;
  Eigen::VectorXd potential_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd whitened_;
  double log_det_ = 0.0;
};

// KL(q || p) between two Gaussians of equal dimension, clamped at zero.
inline double kl_gaussian(const GaussianDensity& q, const GaussianDensity& p) {
  if (q.dim() != p.dim()) {
    fail(ErrorKind::kDimensionMismatch,
         "kl_gaussian: q has dimension " + std::to_string(q.dim()) +
             ", p has dimension " + std::to_string(p.dim()));
  }
  const Eigen::MatrixXd q_cov = q.covariance();
  const Eigen::VectorXd delta = p.mean() - q.mean();
  const double trace_term = (p.precision().cwiseProduct(q_cov)).sum();
  const double mahalanobis = delta.dot(p.precision() * delta);
  const double kl = 0.5 * (trace_term + mahalanobis - q.dim() -
                           p.log_det_precision() + q.log_det_precision());
  return std::max(kl, 0.0);
}

// The information projection of p onto densities supported on s: the
// conditional p(x_S | x_{S^c} = 0), with precision Lambda_S and potential r_S.
inline GaussianDensity condition_on_zero(const GaussianDensity& p,
                                         const SupportSet& s) {
  if (s.empty()) {
    fail(ErrorKind::kInvalidSupport,
         "condition_on_zero: empty support (projection is the point mass at 0)");
  }
  s.check_within(p.dim());
  const auto& idx = s.indices();
  return GaussianDensity(p.precision()(idx, idx), p.potential()(idx), 0.0,
                         "conditional on " + s.to_string());
}

// J~(S) = 1/2 (r_S^T Lambda_S^-1 r_S - log det Lambda_S + |S| log 2 pi).
inline double objective_jtilde(const GaussianDensity& p, const SupportSet& s) {
  if (s.empty()) return 0.0;
  s.check_within(p.dim());
  const auto& idx = s.indices();
  Eigen::LLT<Eigen::MatrixXd> llt(p.precision()(idx, idx));
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::kNotPositiveDefinite,
         "objective_jtilde: precision block on " + s.to_string() +
             " is numerically indefinite");
  }
  const Eigen::MatrixXd lower = llt.matrixL();
  const Eigen::VectorXd whitened = llt.matrixL().solve(p.potential()(idx));
  return 0.5 * (whitened.squaredNorm() - log_det_from_cholesky(lower) +
                s.size() * kLog2Pi);
}

// J(S) = log p(x_{S^c} = 0), the log marginal density of the complement at
// the origin. J([d]) = 0 by convention; J(empty) = log p(0).
inline double log_mass_at_zero(const GaussianDensity& p, const SupportSet& s) {
  s.check_within(p.dim());
  if (s.size() == p.dim()) return 0.0;
  const double log_p0 = p.log_density_at_origin();
  if (s.empty()) return log_p0;
  const GaussianDensity cond = condition_on_zero(p, s);
  return log_p0 - cond.log_density_at_origin();
}

// KL(q || p) for q supported on s, where p is read as the joint density on
// the subspace x_{S^c} = 0. Equals KL(q || p_S) - J(S), so the minimum over
// q is -J(S), attained by condition_on_zero(p, s).
inline double kl_supported(const GaussianDensity& q, const SupportSet& s,
                           const GaussianDensity& p) {
  if (q.dim() != s.size()) {
    fail(ErrorKind::kDimensionMismatch,
         "kl_supported: q has dimension " + std::to_string(q.dim()) +
             " but support has " + std::to_string(s.size()) + " entries");
  }
  return kl_gaussian(q, condition_on_zero(p, s)) - log_mass_at_zero(p, s);
}

// A projected density embedded back into the ambient dimension: the mean and
// covariance are zero off the support. `conditional` is empty for the point
// mass at the origin.
struct ProjectedDensity {
  SupportSet support;
  std::optional<GaussianDensity> conditional;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

inline ProjectedDensity project_onto(const GaussianDensity& p, const SupportSet& s) {
  s.check_within(p.dim());
  ProjectedDensity out{s, std::nullopt, Eigen::VectorXd::Zero(p.dim()),
                       Eigen::MatrixXd::Zero(p.dim(), p.dim())};
  if (s.empty()) return out;
  out.conditional.emplace(condition_on_zero(p, s));
  const auto& idx = s.indices();
  out.mean(idx) = out.conditional->mean();
  out.covariance(idx, idx) = out.conditional->covariance();
  return out;
}

// KL of a projected density against the base density p, following the
// convention of kl_supported. The point mass at the origin scores -log p(0).
inline double kl_projected(const ProjectedDensity& q, const GaussianDensity& p) {
  if (!q.conditional) return -log_mass_at_zero(p, SupportSet{});
  return kl_supported(*q.conditional, q.support, p);
}

}  // namespace infoproj
