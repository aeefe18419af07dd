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

// Rank-one latent factor models fitted by variational EM with a structured
// sparse E-step:
//
//   T = x w^T + E,   w ~ N(0, P^-1),   E_ij ~ N(0, s_j)
//
// x is a deterministic n-vector. Columns may share noise variances through
// noise groups; PPCA uses one group, PCCA one group or one per view.

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "infoproj/constraints.hpp"
#include "infoproj/gaussian.hpp"
#include "infoproj/models/prior.hpp"
#include "infoproj/objective.hpp"
#include "infoproj/solvers.hpp"

namespace infoproj {

inline constexpr double kMinNoiseVariance = 1e-12;

struct FactorParams {
  Eigen::VectorXd x;
  Eigen::VectorXd sigma2;  // one entry per noise group
};

struct FactorData {
  Eigen::MatrixXd T;
  GaussianPrior prior;
  std::vector<int> noise_group;  // per column; empty means one shared group

  int num_noise_groups() const {
    int g = 0;
    for (int v : noise_group) g = std::max(g, v + 1);
    return noise_group.empty() ? 1 : g;
  }
  int noise_of(Eigen::Index j) const {
    return noise_group.empty() ? 0 : noise_group[static_cast<std::size_t>(j)];
  }

  void validate() const {
    if (T.rows() == 0 || T.cols() == 0) fail(ErrorKind::kInvalidArgument, "factor model: empty data");
    if (!T.allFinite()) fail(ErrorKind::kInvalidArgument, "factor model: non-finite data");
    if (prior.dim() != T.cols()) {
      fail(ErrorKind::kDimensionMismatch, "factor model: prior dimension " +
                                              std::to_string(prior.dim()) + " vs " +
                                              std::to_string(T.cols()) + " columns");
    }
    if (!noise_group.empty()) {
      if (static_cast<Eigen::Index>(noise_group.size()) != T.cols()) {
        fail(ErrorKind::kDimensionMismatch, "factor model: one noise group per column expected");
      }
      std::vector<int> seen(static_cast<std::size_t>(num_noise_groups()), 0);
      for (int v : noise_group) {
        if (v < 0) fail(ErrorKind::kInvalidArgument, "factor model: negative noise group");
        seen[static_cast<std::size_t>(v)] = 1;
      }
      for (int s : seen) {
        if (!s) fail(ErrorKind::kInvalidArgument, "factor model: empty noise group");
      }
    }
  }

  void check_params(const FactorParams& p) const {
    if (p.x.size() != T.rows()) {
      fail(ErrorKind::kDimensionMismatch, "factor model: x must have one entry per row");
    }
    if (p.sigma2.size() != num_noise_groups()) {
      fail(ErrorKind::kDimensionMismatch, "factor model: one noise variance per group expected");
    }
    if (!p.x.allFinite()) fail(ErrorKind::kInvalidArgument, "factor model: non-finite x");
    for (double s : p.sigma2) {
      if (!(s > 0) || !std::isfinite(s)) {
        fail(ErrorKind::kInvalidArgument, "factor model: noise variance must be positive");
      }
    }
  }

  Eigen::VectorXd column_variance(const FactorParams& p) const {
    Eigen::VectorXd s(T.cols());
    for (Eigen::Index j = 0; j < T.cols(); ++j) s[j] = p.sigma2[noise_of(j)];
    return s;
  }
};

// Lambda = P + diag(|x|^2 / s), r = T^T x / s.
inline GaussianDensity factor_posterior(const FactorData& data, const FactorParams& p) {
  data.check_params(p);
  const Eigen::VectorXd s = data.column_variance(p);
  Eigen::MatrixXd precision = data.prior.precision();
  precision.diagonal().array() += p.x.squaredNorm() / s.array();
  Eigen::VectorXd potential = (data.T.transpose() * p.x).array() / s.array();
  return GaussianDensity(std::move(precision), std::move(potential), 0.0, "factor posterior");
}

// log p(T; theta) with w integrated out.
inline double log_marginal_likelihood(const FactorData& data, const FactorParams& p,
                                      const GaussianDensity& posterior) {
  const Eigen::VectorXd s = data.column_variance(p);
  const double n = static_cast<double>(data.T.rows());
  double out = 0.5 * data.prior.log_det_precision() - 0.5 * posterior.log_det_precision() +
               0.5 * posterior.potential_quadratic();
  for (Eigen::Index j = 0; j < data.T.cols(); ++j) {
    out -= 0.5 * n * (kLog2Pi + std::log(s[j])) + data.T.col(j).squaredNorm() / (2.0 * s[j]);
  }
  return out;
}

// F(q, theta) = -KL(q || p(w | T; theta)) + log p(T; theta).
inline double free_energy(const FactorData& data, const FactorParams& p,
                          const ProjectedDensity& q) {
  const GaussianDensity posterior = factor_posterior(data, p);
  const double f = log_marginal_likelihood(data, p, posterior) - kl_projected(q, posterior);
  if (!std::isfinite(f)) fail(ErrorKind::kObjectiveFailure, "free energy is not finite");
  return f;
}

struct SupportChoice {
  SelectionResult selection;
  SupportSet support;
};

// Chooses a support for the projected posterior.
using SupportSelector = std::function<SupportChoice(const GaussianDensity&)>;

inline SupportSelector group_budget_selector(GroupStructure groups, int budget,
                                             PartialEnumOptions opt = {}) {
  return [groups = std::move(groups), budget, opt](const GaussianDensity& post) {
    const GroupGaussianObjective f(post, groups);
    SupportChoice out;
    out.selection = greedy_partial_enum(f, groups, budget, opt);
    out.support = expand_groups(groups, out.selection.selected);
    return out;
  };
}

// At most k coordinates.
inline SupportSelector uniform_selector(int k, GreedyOptions opt = {}) {
  return [k, opt](const GaussianDensity& post) {
    const GaussianObjective f(post);
    SupportChoice out;
    out.selection = greedy_matroid(f, SupportConstraint(UniformMatroid(post.dim(), k)), opt);
    out.support = SupportSet(out.selection.selected);
    return out;
  };
}

// At most caps[v] coordinates from views[v].
inline SupportSelector multiview_selector(std::vector<std::vector<int>> views,
                                          std::vector<int> caps, GreedyOptions opt = {}) {
  return [views = std::move(views), caps = std::move(caps), opt](const GaussianDensity& post) {
    const GaussianObjective f(post);
    SupportChoice out;
    out.selection = greedy_multiview(f, views, caps, opt);
    out.support = SupportSet(out.selection.selected);
    return out;
  };
}

struct EStepResult {
  GaussianDensity posterior;
  SupportChoice choice;
  SupportSet support;  // differs from choice.support when the previous support was kept
  ProjectedDensity q;
  bool kept_previous = false;
};

// Projects the posterior onto the selected support. When `previous` retains
// more mass at zero than the new selection, it is kept, so F cannot drop.
inline EStepResult factor_estep(const FactorData& data, const FactorParams& p,
                                const SupportSelector& select,
                                const std::optional<SupportSet>& previous = std::nullopt) {
  GaussianDensity posterior = factor_posterior(data, p);
  SupportChoice choice = select(posterior);
  SupportSet support = choice.support;
  bool kept = false;
  if (previous && *previous != support &&
      objective_jtilde(posterior, *previous) > objective_jtilde(posterior, support)) {
    support = *previous;
    kept = true;
  }
  ProjectedDensity q = project_onto(posterior, support);
  return {std::move(posterior), std::move(choice), std::move(support), std::move(q), kept};
}

struct MStepResult {
  FactorParams params;
  bool degenerate = false;  // E[w^T w] = 0, x left unchanged
};

// Maximizes E_q[log p(T | w; theta)]. With one noise group the update is the
// closed form
//   x = T mu / (mu^T mu + tr Sigma)
//   s = (|T|^2 - 2 x^T T mu + |x|^2 (mu^T mu + tr Sigma)) / (n d);
// with several groups x and s are alternated to a fixed point.
inline MStepResult factor_mstep(const FactorData& data, const ProjectedDensity& q,
                                const FactorParams& current) {
  data.check_params(current);
  const Eigen::Index n = data.T.rows();
  const Eigen::Index d = data.T.cols();
  if (q.mean.size() != d || q.covariance.rows() != d) {
    fail(ErrorKind::kDimensionMismatch, "m-step: q has the wrong dimension");
  }
  const Eigen::ArrayXd second = q.mean.array().square() + q.covariance.diagonal().array();
  const Eigen::ArrayXd col_sq = data.T.colwise().squaredNorm().transpose().array();
  const int groups = data.num_noise_groups();
  std::vector<double> group_cols(static_cast<std::size_t>(groups), 0.0);
  for (Eigen::Index j = 0; j < d; ++j) group_cols[static_cast<std::size_t>(data.noise_of(j))] += 1;

  MStepResult out{current, false};
  const int max_rounds = groups == 1 ? 1 : 200;
  for (int round = 0; round < max_rounds; ++round) {
    const Eigen::ArrayXd s = data.column_variance(out.params).array();
    const double denom = (second / s).sum();
    Eigen::VectorXd x = out.params.x;
    if (denom > 0 && std::isfinite(denom)) {
      const Eigen::VectorXd weights = (q.mean.array() / s).matrix();
      x = data.T * weights / denom;
    } else {
      out.degenerate = true;
    }
    const Eigen::ArrayXd cross = (data.T.transpose() * x).array() * q.mean.array();
    const Eigen::ArrayXd residual = col_sq - 2.0 * cross + x.squaredNorm() * second;
    Eigen::VectorXd sigma2 = Eigen::VectorXd::Zero(groups);
    for (Eigen::Index j = 0; j < d; ++j) sigma2[data.noise_of(j)] += residual[j];
    for (int g = 0; g < groups; ++g) {
      sigma2[g] = std::max(sigma2[g] / (static_cast<double>(n) * group_cols[static_cast<std::size_t>(g)]),
                           kMinNoiseVariance);
    }
    const double change = (x - out.params.x).norm() + (sigma2 - out.params.sigma2).norm();
    const double scale = x.norm() + sigma2.norm();
    out.params.x = std::move(x);
    out.params.sigma2 = std::move(sigma2);
    if (out.degenerate || change <= 1e-14 * scale) break;
  }
  return out;
}

// x = u1 s1 from the leading singular pair; per-group residual variance.
inline FactorParams svd_init(const FactorData& data) {
  data.validate();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(data.T, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double s1 = svd.singularValues()[0];
  FactorParams p;
  p.x = svd.matrixU().col(0) * s1;
  const Eigen::MatrixXd residual = data.T - p.x * svd.matrixV().col(0).transpose();
  const int groups = data.num_noise_groups();
  p.sigma2 = Eigen::VectorXd::Zero(groups);
  Eigen::VectorXd cols = Eigen::VectorXd::Zero(groups);
  for (Eigen::Index j = 0; j < data.T.cols(); ++j) {
    p.sigma2[data.noise_of(j)] += residual.col(j).squaredNorm();
    cols[data.noise_of(j)] += 1;
  }
  for (int g = 0; g < groups; ++g) {
    p.sigma2[g] = std::max(p.sigma2[g] / (static_cast<double>(data.T.rows()) * cols[g]),
                           kMinNoiseVariance);
  }
  return p;
}

struct EmOptions {
  int max_iters = 100;
  double tol = 1e-8;  // on the change of F across one iteration
};

enum class EmStatus { kConverged, kMaxIterations, kDiverged };

inline const char* to_string(EmStatus s) {
  switch (s) {
    case EmStatus::kConverged: return "converged";
    case EmStatus::kMaxIterations: return "max_iterations";
    case EmStatus::kDiverged: return "diverged";
  }
  return "unknown";
}

struct FactorFit {
  FactorParams params;
  SupportSet support;
  SelectionResult selection;
  ProjectedDensity q;
  std::vector<double> trace;  // F after every E-step and every M-step
  int iterations = 0;
  EmStatus status = EmStatus::kMaxIterations;
  int degenerate_msteps = 0;
};

inline FactorFit fit_factor_em(const FactorData& data, FactorParams init,
                               const SupportSelector& select, const EmOptions& opt = {}) {
  data.validate();
  data.check_params(init);
  if (opt.max_iters < 0) fail(ErrorKind::kInvalidArgument, "em: max_iters must be >= 0");
  FactorFit fit;
  fit.params = std::move(init);
  fit.q = ProjectedDensity{SupportSet{}, std::nullopt, Eigen::VectorXd::Zero(data.T.cols()),
                           Eigen::MatrixXd::Zero(data.T.cols(), data.T.cols())};
  std::optional<SupportSet> previous;
  double last = 0.0;
  for (int it = 0; it < opt.max_iters; ++it) {
    EStepResult e = factor_estep(data, fit.params, select, previous);
    const double f_e = log_marginal_likelihood(data, fit.params, e.posterior) -
                       kl_projected(e.q, e.posterior);
    fit.trace.push_back(f_e);
    fit.support = e.support;
    fit.selection = std::move(e.choice.selection);
    fit.q = std::move(e.q);
    if (!std::isfinite(f_e)) {
      fit.status = EmStatus::kDiverged;
      return fit;
    }
    MStepResult m = factor_mstep(data, fit.q, fit.params);
    if (m.degenerate) ++fit.degenerate_msteps;
    const GaussianDensity next = factor_posterior(data, m.params);
    const double f_m = log_marginal_likelihood(data, m.params, next) - kl_projected(fit.q, next);
    fit.trace.push_back(f_m);
    fit.params = std::move(m.params);
    fit.iterations = it + 1;
    previous = fit.support;
    if (!std::isfinite(f_m)) {
      fit.status = EmStatus::kDiverged;
      return fit;
    }
    if (it > 0 && std::abs(f_m - last) < opt.tol) {
      fit.status = EmStatus::kConverged;
      return fit;
    }
    last = f_m;
  }
  fit.status = EmStatus::kMaxIterations;
  return fit;
}

// ---------------------------------------------------------------------------
// PPCA

struct PpcaModel {
  Eigen::MatrixXd T;  // n x d
  GaussianPrior prior;
  Eigen::VectorXd x;  // empty: initialize from the SVD
  double sigma2 = 0.0;  // used only when x is given
  GroupStructure groups;
  int budget = 0;
};

enum class PpcaSelection {
  kGroupBudget,  // partial enumeration over groups under the cost budget
  kUniform,      // greedy over coordinates, at most `budget` of them
};

struct PpcaOptions {
  EmOptions em;
  PpcaSelection selection = PpcaSelection::kGroupBudget;
  PartialEnumOptions solver;
};

inline FactorData ppca_data(const PpcaModel& m) {
  FactorData data{m.T, m.prior, {}};
  data.validate();
  if (m.groups.dim() != m.T.cols()) {
    fail(ErrorKind::kDimensionMismatch, "ppca: group dimension does not match T");
  }
  if (m.budget < 0) fail(ErrorKind::kInvalidArgument, "ppca: negative budget");
  return data;
}

inline FactorParams ppca_params(const PpcaModel& m) {
  const FactorData data = ppca_data(m);
  if (m.x.size() == 0) return svd_init(data);
  FactorParams p{m.x, Eigen::VectorXd::Constant(1, m.sigma2)};
  data.check_params(p);
  return p;
}

inline SupportSelector ppca_selector(const PpcaModel& m, const PpcaOptions& opt) {
  if (opt.selection == PpcaSelection::kUniform) return uniform_selector(m.budget, opt.solver.greedy);
  return group_budget_selector(m.groups, m.budget, opt.solver);
}

inline GaussianDensity ppca_posterior(const PpcaModel& m) {
  return factor_posterior(ppca_data(m), ppca_params(m));
}

inline EStepResult ppca_estep(const PpcaModel& m, const PpcaOptions& opt = {}) {
  return factor_estep(ppca_data(m), ppca_params(m), ppca_selector(m, opt));
}

inline MStepResult ppca_mstep(const PpcaModel& m, const ProjectedDensity& q) {
  return factor_mstep(ppca_data(m), q, ppca_params(m));
}

inline double free_energy(const PpcaModel& m, const ProjectedDensity& q) {
  return free_energy(ppca_data(m), ppca_params(m), q);
}

inline FactorFit ppca_em(const PpcaModel& m, const PpcaOptions& opt = {}) {
  return fit_factor_em(ppca_data(m), ppca_params(m), ppca_selector(m, opt), opt.em);
}

// ---------------------------------------------------------------------------
// PCCA

struct PccaModel {
  std::vector<Eigen::MatrixXd> views;  // T_i, n x d_i
  std::vector<GaussianPrior> priors;   // one per view
  std::vector<int> caps;               // k_i
  bool per_view_noise = false;
};

struct StackedViews {
  FactorData data;
  std::vector<std::vector<int>> blocks;  // stacked column ids per view
};

inline StackedViews stack_views(const PccaModel& m) {
  const std::size_t v = m.views.size();
  if (v == 0) fail(ErrorKind::kInvalidArgument, "pcca: no views");
  if (m.priors.size() != v || m.caps.size() != v) {
    fail(ErrorKind::kDimensionMismatch, "pcca: need one prior and one cap per view");
  }
  const Eigen::Index n = m.views[0].rows();
  Eigen::Index total = 0;
  for (std::size_t i = 0; i < v; ++i) {
    if (m.views[i].rows() != n) {
      fail(ErrorKind::kDimensionMismatch, "pcca: view " + std::to_string(i) +
                                              " has a different number of rows");
    }
    if (m.priors[i].dim() != m.views[i].cols()) {
      fail(ErrorKind::kDimensionMismatch,
           "pcca: prior " + std::to_string(i) + " does not match its view");
    }
    if (m.caps[i] < 0) fail(ErrorKind::kInvalidArgument, "pcca: negative cap");
    total += m.views[i].cols();
  }
  StackedViews out;
  out.data.T.resize(n, total);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < v; ++i) {
    const Eigen::Index di = m.views[i].cols();
    out.data.T.middleCols(at, di) = m.views[i];
    std::vector<int> block;
    for (Eigen::Index j = 0; j < di; ++j) {
      block.push_back(static_cast<int>(at + j));
      if (m.per_view_noise) out.data.noise_group.push_back(static_cast<int>(i));
    }
    out.blocks.push_back(std::move(block));
    at += di;
  }
  out.data.prior = v == 1 ? m.priors[0] : GaussianPrior::block_diagonal(m.priors);
  out.data.validate();
  return out;
}

struct PccaFit {
  FactorFit fit;
  std::vector<Eigen::VectorXd> w;             // posterior mean per view
  std::vector<std::vector<int>> view_support;  // local column ids per view
};

struct PccaOptions {
  EmOptions em;
  GreedyOptions greedy;
};

inline PccaFit pcca_fit(const PccaModel& m, const PccaOptions& opt = {}) {
  StackedViews stacked = stack_views(m);
  PccaFit out;
  out.fit = fit_factor_em(stacked.data, svd_init(stacked.data),
                          multiview_selector(stacked.blocks, m.caps, opt.greedy), opt.em);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < m.views.size(); ++i) {
    const Eigen::Index di = m.views[i].cols();
    out.w.push_back(out.fit.q.mean.segment(at, di));
    std::vector<int> local;
    for (int j : out.fit.support) {
      if (j >= at && j < at + di) local.push_back(static_cast<int>(j - at));
    }
    out.view_support.push_back(std::move(local));
    at += di;
  }
  return out;
}

}  // namespace infoproj
