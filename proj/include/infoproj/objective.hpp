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

// Set objectives with an incremental marginal-gain interface.
//
// The Gaussian objective J~(A) is tracked through a Cholesky factor L of
// Lambda_A (in insertion order) and the whitened potential w = L^-1 r_A:
//
//   J~(A) = 1/2 (|w|^2 - log det Lambda_A + |A| log 2 pi).
//
// Adding a block B extends the factor by one block row,
//
//   L' = [ L    0 ]   X = L^-1 Lambda_{A,B},  M M^T = Lambda_B - X^T X,
//        [ X^T  M ]   w' = [w; M^-1 (r_B - X^T w)],
//
// at O(|A|^2 |B|) cost without refactorizing Lambda_{A u B}.

#pragma once

#include <concepts>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "infoproj/constraints.hpp"
#include "infoproj/errors.hpp"
#include "infoproj/gaussian.hpp"
#include "infoproj/support.hpp"

namespace infoproj {

// A set objective evaluated through an opaque accumulation state. gain()
// returns f(A u {e}) - f(A) for the set A summarized by the state.
template <class F>
concept IncrementalObjective =
    requires(const F& f, const typename F::State& state, int e) {
      { f.ground_size() } -> std::convertible_to<int>;
      { f.initial_state() } -> std::convertible_to<typename F::State>;
      { f.gain(state, e) } -> std::convertible_to<double>;
      { f.extend(state, e) } -> std::convertible_to<typename F::State>;
      { f.state_value(state) } -> std::convertible_to<double>;
      { f.monotone() } -> std::convertible_to<bool>;
    };

// Factorization of Lambda restricted to the current support.
struct GainState {
  std::vector<int> order;   // support in insertion order
  Eigen::MatrixXd chol;     // lower factor of Lambda_order
  Eigen::VectorXd whitened; // chol^-1 r_order
  double log_det = 0.0;     // log det Lambda_order

  int size() const noexcept { return static_cast<int>(order.size()); }

  double value() const noexcept {
    return 0.5 * (whitened.squaredNorm() - log_det + size() * kLog2Pi);
  }

  SupportSet support() const { return SupportSet(order); }
};

namespace detail {

struct BlockExtension {
  Eigen::MatrixXd cross;        // L^-1 Lambda_{A,B}, |A| x |B|
  Eigen::MatrixXd schur_factor; // lower factor of the Schur complement
  Eigen::VectorXd tail;         // new entries of the whitened potential
  double log_det_tail = 0.0;
  double gain = 0.0;
};

inline BlockExtension extend_block(const GaussianDensity& p, const GainState& state,
                                   std::span<const int> block) {
  const std::vector<int> idx(block.begin(), block.end());
  BlockExtension ext;
  Eigen::MatrixXd schur = p.precision()(idx, idx);
  Eigen::VectorXd rhs = p.potential()(idx);
  if (state.size() > 0) {
    ext.cross = state.chol.triangularView<Eigen::Lower>().solve(
        p.precision()(state.order, idx));
    schur.noalias() -= ext.cross.transpose() * ext.cross;
    rhs.noalias() -= ext.cross.transpose() * state.whitened;
  }
  if (idx.size() == 1) {
    const double s = schur(0, 0);
    if (!(s > 0.0)) {
      fail(ErrorKind::kNotPositiveDefinite,
           "Schur complement is not positive for block " + format_indices(idx));
    }
    const double root = std::sqrt(s);
    ext.schur_factor = Eigen::MatrixXd::Constant(1, 1, root);
    ext.tail = rhs / root;
    ext.log_det_tail = std::log(s);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    if (llt.info() != Eigen::Success) {
      fail(ErrorKind::kNotPositiveDefinite,
           "Schur complement is not positive definite for block " + format_indices(idx));
    }
    ext.schur_factor = llt.matrixL();
    ext.tail = llt.matrixL().solve(rhs);
    ext.log_det_tail = log_det_from_cholesky(ext.schur_factor);
  }
  ext.gain = 0.5 * (ext.tail.squaredNorm() - ext.log_det_tail +
                    static_cast<double>(idx.size()) * kLog2Pi);
  return ext;
}

inline GainState apply_extension(const GainState& state, std::span<const int> block,
                                 const BlockExtension& ext) {
  const Eigen::Index k = state.size();
  const Eigen::Index b = static_cast<Eigen::Index>(block.size());
  GainState next;
  next.order = state.order;
  next.order.insert(next.order.end(), block.begin(), block.end());
  next.chol = Eigen::MatrixXd::Zero(k + b, k + b);
  if (k > 0) {
    next.chol.topLeftCorner(k, k) = state.chol;
    next.chol.bottomLeftCorner(b, k) = ext.cross.transpose();
  }
  next.chol.bottomRightCorner(b, b) = ext.schur_factor;
  next.whitened.resize(k + b);
  next.whitened.head(k) = state.whitened;
  next.whitened.tail(b) = ext.tail;
  next.log_det = state.log_det + ext.log_det_tail;
  return next;
}

inline void check_block(const GaussianDensity& p, const GainState& state,
                        std::span<const int> block) {
  if (block.empty()) fail(ErrorKind::kInvalidArgument, "marginal gain: empty block");
  for (int i : block) {
    if (i < 0 || i >= p.dim()) {
      fail(ErrorKind::kInvalidSupport, "marginal gain: index " + std::to_string(i) +
                                           " out of range");
    }
  }
  for (int i : block) {
    for (int j : state.order) {
      if (i == j) {
        fail(ErrorKind::kInvalidSupport,
             "marginal gain: candidate index " + std::to_string(i) +
                 " already in the current support");
      }
    }
  }
}

}  // namespace detail

inline GainState empty_gain_state() {
  return GainState{{}, Eigen::MatrixXd(0, 0), Eigen::VectorXd(0), 0.0};
}

// Builds the state for `support` from scratch.
inline GainState gain_state_for(const GaussianDensity& p, const SupportSet& support) {
  support.check_within(p.dim());
  GainState state = empty_gain_state();
  if (support.empty()) return state;
  const auto ext = detail::extend_block(p, state, support.indices());
  return detail::apply_extension(state, support.indices(), ext);
}

// J~(current u block) - J~(current), plus the state for current u block.
// `state` must describe `current`; the block must be disjoint from it.
inline std::pair<double, GainState> marginal_gain(const GaussianDensity& p,
                                                  const SupportSet& current,
                                                  const SupportSet& candidate_block,
                                                  const GainState& state) {
  if (!current.disjoint_from(candidate_block)) {
    fail(ErrorKind::kInvalidSupport,
         "marginal gain: candidate " + candidate_block.to_string() +
             " overlaps current support " + current.to_string());
  }
  if (SupportSet(state.order) != current) {
    fail(ErrorKind::kInvalidArgument,
         "marginal gain: state describes " + format_indices(state.order) +
             " but current support is " + current.to_string());
  }
  detail::check_block(p, state, candidate_block.indices());
  const auto ext = detail::extend_block(p, state, candidate_block.indices());
  return {ext.gain, detail::apply_extension(state, candidate_block.indices(), ext)};
}

// J~ over single coordinates of a Gaussian density.
class GaussianObjective {
 public:
  using State = GainState;

  explicit GaussianObjective(GaussianDensity density) : density_(std::move(density)) {}

  const GaussianDensity& density() const noexcept { return density_; }
  int ground_size() const noexcept { return density_.dim(); }
  bool monotone() const noexcept { return true; }
  State initial_state() const { return empty_gain_state(); }

  double gain(const State& state, int e) const {
    const int block[] = {e};
    detail::check_block(density_, state, block);
    return detail::extend_block(density_, state, block).gain;
  }

  State extend(const State& state, int e) const {
    const int block[] = {e};
    detail::check_block(density_, state, block);
    return detail::apply_extension(state, block, detail::extend_block(density_, state, block));
  }

  double state_value(const State& state) const noexcept { return state.value(); }

  double value(std::span<const int> set) const {
    return objective_jtilde(density_, SupportSet(std::vector<int>(set.begin(), set.end())));
  }

 private:
  GaussianDensity density_;
};

// J~ over group ids: selecting group g adds the whole block G_g.
class GroupGaussianObjective {
 public:
  using State = GainState;

  GroupGaussianObjective(GaussianDensity density, GroupStructure groups)
      : density_(std::move(density)), groups_(std::move(groups)) {
    if (groups_.dim() != density_.dim()) {
      fail(ErrorKind::kDimensionMismatch,
           "group structure dimension " + std::to_string(groups_.dim()) +
               " does not match density dimension " + std::to_string(density_.dim()));
    }
    for (int g = 0; g < groups_.num_groups(); ++g) {
      if (groups_.group(g).empty()) {
        fail(ErrorKind::kInvalidArgument, "group " + std::to_string(g) + " is empty");
      }
    }
  }

  const GaussianDensity& density() const noexcept { return density_; }
  const GroupStructure& groups() const noexcept { return groups_; }
  int ground_size() const noexcept { return groups_.num_groups(); }
  bool monotone() const noexcept { return true; }
  State initial_state() const { return empty_gain_state(); }

  double gain(const State& state, int g) const {
    const auto& block = groups_.group(g).indices();
    detail::check_block(density_, state, block);
    return detail::extend_block(density_, state, block).gain;
  }

  State extend(const State& state, int g) const {
    const auto& block = groups_.group(g).indices();
    detail::check_block(density_, state, block);
    return detail::apply_extension(state, block,
                                   detail::extend_block(density_, state, block));
  }

  double state_value(const State& state) const noexcept { return state.value(); }

  double value(std::span<const int> set) const {
    return objective_jtilde(density_, expand_groups(groups_, set));
  }

 private:
  GaussianDensity density_;
  GroupStructure groups_;
};

// f(A) = sum of weights over A.
class ModularObjective {
 public:
  struct State {
    double value = 0.0;
  };

  explicit ModularObjective(std::vector<double> weights, bool monotone = true)
      : weights_(std::move(weights)), monotone_(monotone) {}

  int ground_size() const noexcept { return static_cast<int>(weights_.size()); }
  bool monotone() const noexcept { return monotone_; }
  State initial_state() const noexcept { return {}; }
  double gain(const State&, int e) const { return weights_.at(static_cast<std::size_t>(e)); }
  State extend(const State& s, int e) const { return {s.value + gain(s, e)}; }
  double state_value(const State& s) const noexcept { return s.value; }

  double value(std::span<const int> set) const {
    double v = 0.0;
    for (int e : set) v += weights_.at(static_cast<std::size_t>(e));
    return v;
  }

 private:
  std::vector<double> weights_;
  bool monotone_;
};

// Adapts an arbitrary set function (value of empty set must be 0). Gains are
// naive differences, so this is meant for small instances and tests.
class FunctionObjective {
 public:
  using ValueFn = std::function<double(std::span<const int>)>;

  struct State {
    std::vector<int> members;
    double value = 0.0;
  };

  FunctionObjective(int ground_size, ValueFn fn, bool monotone = true)
      : ground_size_(ground_size), fn_(std::move(fn)), monotone_(monotone) {}

  int ground_size() const noexcept { return ground_size_; }
  bool monotone() const noexcept { return monotone_; }
  State initial_state() const { return {}; }

  double gain(const State& s, int e) const {
    auto members = s.members;
    members.push_back(e);
    return fn_(members) - s.value;
  }

  State extend(const State& s, int e) const {
    State next{s.members, 0.0};
    next.members.push_back(e);
    next.value = fn_(next.members);
    return next;
  }

  double state_value(const State& s) const noexcept { return s.value; }
  double value(std::span<const int> set) const { return fn_(set); }

 private:
  int ground_size_;
  ValueFn fn_;
  bool monotone_;
};

}  // namespace infoproj
