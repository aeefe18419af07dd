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

// Greedy maximization of monotone set objectives under matroid and knapsack
// constraints, plus an exhaustive oracle for small instances.
//
//   greedy_matroid        best-gain element, kept if independence holds
//   greedy_multiview      the same over a partition matroid, per-view counters
//   reweighted_greedy     best gain-per-cost group, kept if within budget
//   greedy_partial_enum   reweighted greedy from every feasible m-seed
//   brute_force_max       exact maximizer by enumeration of independent sets
//
// Ties between candidates whose gains agree to a relative 1e-12 go to the
// lowest element id, so eager runs are reproducible regardless of thread
// count. An element that cannot be added to the current set is discarded
// without being evaluated: independence systems are downward closed, so it
// could never be added later and the selected set is unchanged.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <queue>
#include <thread>
#include <vector>

#include "infoproj/constraints.hpp"
#include "infoproj/errors.hpp"
#include "infoproj/objective.hpp"

namespace infoproj {

struct SelectionStep {
  int element = -1;
  double gain = 0.0;
  double value = 0.0;  // objective after the step
};

struct SelectionResult {
  std::vector<int> selected;  // sorted
  std::vector<SelectionStep> trace;
  double objective_value = 0.0;
  std::int64_t evaluations = 0;
};

struct GreedyOptions {
  // Priority-queue evaluation with stale upper bounds. Exact for submodular
  // objectives; eager evaluation is the reference behavior.
  bool lazy = false;
  // Worker threads for gain evaluation within a step (eager mode only).
  int threads = 1;
  double tie_tolerance = 1e-12;
};

struct PartialEnumOptions {
  int m = 3;
  // Use the literal completion budget k - m - 1 instead of the full budget k.
  bool compat_budget = false;
  GreedyOptions greedy;
};

inline constexpr std::int64_t kDefaultEnumerationCap = std::int64_t{1} << 20;

namespace detail {

inline bool strictly_better(double candidate, double incumbent, double tol) {
  if (!(candidate > incumbent)) return false;
  return candidate - incumbent >
         tol * std::max(std::abs(candidate), std::abs(incumbent));
}

[[noreturn]] inline void rethrow_as_objective_failure(const std::vector<int>& set,
                                                      int element) {
  try {
    throw;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kObjectiveFailure) throw;
    auto members = set;
    members.push_back(element);
    fail(ErrorKind::kObjectiveFailure,
         "objective evaluation failed at set " + format_indices(members) + ": " +
             e.what());
  }
}

template <IncrementalObjective F>
double checked_gain(const F& f, const typename F::State& state,
                    const std::vector<int>& selected, int e) {
  double g = 0.0;
  try {
    g = f.gain(state, e);
  } catch (const Error&) {
    rethrow_as_objective_failure(selected, e);
  }
  if (!std::isfinite(g)) {
    auto members = selected;
    members.push_back(e);
    fail(ErrorKind::kObjectiveFailure,
         "non-finite gain at set " + format_indices(members));
  }
  return g;
}

// Gains for all candidates. With threads > 1 the candidates are split into
// contiguous chunks; the output order never depends on scheduling.
template <IncrementalObjective F>
std::vector<double> evaluate_gains(const F& f, const typename F::State& state,
                                   const std::vector<int>& selected,
                                   const std::vector<int>& candidates, int threads) {
  std::vector<double> gains(candidates.size());
  const std::size_t n = candidates.size();
  const std::size_t workers =
      threads > 1 ? std::min<std::size_t>(static_cast<std::size_t>(threads), n) : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      gains[i] = checked_gain(f, state, selected, candidates[i]);
    }
    return gains;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&, w, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) {
          gains[i] = checked_gain(f, state, selected, candidates[i]);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return gains;
}

struct IdentityScore {
  double operator()(double gain, int) const noexcept { return gain; }
};

struct CostScore {
  const GroupStructure* groups;
  double operator()(double gain, int g) const { return gain / groups->group_cost(g); }
};

// Feasibility through the constraint's independence oracle.
class OraclePolicy {
 public:
  OraclePolicy(const SupportConstraint& c, std::vector<int> initial)
      : constraint_(&c), members_(std::move(initial)) {}

  bool admits(int e) {
    members_.push_back(e);
    const bool ok = constraint_->is_independent(members_);
    members_.pop_back();
    return ok;
  }
  void accept(int e) { members_.push_back(e); }

 private:
  const SupportConstraint* constraint_;
  std::vector<int> members_;
};

// Per-view selection counters.
class MultiviewPolicy {
 public:
  MultiviewPolicy(std::vector<int> view_of, std::vector<int> caps)
      : view_of_(std::move(view_of)), caps_(std::move(caps)), selected_(caps_.size(), 0) {}

  bool admits(int e) const {
    const auto v = static_cast<std::size_t>(view_of_[static_cast<std::size_t>(e)]);
    return selected_[v] < caps_[v];
  }
  void accept(int e) { ++selected_[static_cast<std::size_t>(view_of_[static_cast<std::size_t>(e)])]; }

 private:
  std::vector<int> view_of_;
  std::vector<int> caps_;
  std::vector<int> selected_;
};

// Running group cost against a budget.
class BudgetPolicy {
 public:
  BudgetPolicy(const GroupStructure& groups, int budget, int spent)
      : groups_(&groups), budget_(budget), spent_(spent) {}

  bool admits(int g) const { return spent_ + groups_->group_cost(g) <= budget_; }
  void accept(int g) { spent_ += groups_->group_cost(g); }

 private:
  const GroupStructure* groups_;
  int budget_;
  int spent_;
};

// Shared greedy loop: repeatedly take the best-scoring remaining element,
// add it when the policy admits it, and drop it from the candidates either way.
template <IncrementalObjective F, class Policy, class Score>
void run_greedy(const F& f, typename F::State state, std::vector<int> remaining,
                Policy& policy, Score score, const GreedyOptions& opt,
                SelectionResult& out) {
  std::vector<int> order;  // insertion order of `out.selected`
  for (const auto& step : out.trace) order.push_back(step.element);

  auto take = [&](int e, double gain) {
    policy.accept(e);
    state = f.extend(state, e);
    order.push_back(e);
    out.trace.push_back({e, gain, f.state_value(state)});
  };

  if (!opt.lazy) {
    while (true) {
      std::erase_if(remaining, [&](int e) { return !policy.admits(e); });
      if (remaining.empty()) break;
      const auto gains = evaluate_gains(f, state, order, remaining, opt.threads);
      out.evaluations += static_cast<std::int64_t>(remaining.size());
      std::size_t best = 0;
      double best_score = score(gains[0], remaining[0]);
      for (std::size_t i = 1; i < remaining.size(); ++i) {
        const double s = score(gains[i], remaining[i]);
        if (strictly_better(s, best_score, opt.tie_tolerance)) {
          best = i;
          best_score = s;
        }
      }
      const int chosen = remaining[best];
      const double gain = gains[best];
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
      if (!f.monotone() && gain < 0.0) continue;
      take(chosen, gain);
    }
  } else {
    struct Entry {
      double score;
      double gain;
      int element;
      std::size_t stamp;
    };
    auto below = [](const Entry& a, const Entry& b) {
      if (a.score != b.score) return a.score < b.score;
      return a.element > b.element;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(below)> heap(below);
    std::erase_if(remaining, [&](int e) { return !policy.admits(e); });
    const auto gains = evaluate_gains(f, state, order, remaining, opt.threads);
    out.evaluations += static_cast<std::int64_t>(remaining.size());
    std::size_t step = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      heap.push({score(gains[i], remaining[i]), gains[i], remaining[i], step});
    }
    while (!heap.empty()) {
      Entry top = heap.top();
      heap.pop();
      if (!policy.admits(top.element)) continue;
      if (top.stamp == step) {
        if (!f.monotone() && top.gain < 0.0) continue;
        take(top.element, top.gain);
        ++step;
        continue;
      }
      top.gain = checked_gain(f, state, order, top.element);
      ++out.evaluations;
      top.score = score(top.gain, top.element);
      top.stamp = step;
      heap.push(top);
    }
  }
  out.selected = order;
  std::sort(out.selected.begin(), out.selected.end());
  out.objective_value = f.state_value(state);
}

template <IncrementalObjective F>
std::vector<int> full_ground(const F& f) {
  std::vector<int> ground(static_cast<std::size_t>(f.ground_size()));
  for (int i = 0; i < f.ground_size(); ++i) ground[static_cast<std::size_t>(i)] = i;
  return ground;
}

inline std::vector<int> normalized_ground(std::vector<int> ground, int ground_size) {
  std::sort(ground.begin(), ground.end());
  ground.erase(std::unique(ground.begin(), ground.end()), ground.end());
  for (int e : ground) {
    if (e < 0 || e >= ground_size) {
      fail(ErrorKind::kInvalidArgument,
           "ground element " + std::to_string(e) + " outside objective domain");
    }
  }
  return ground;
}

template <IncrementalObjective F>
void check_group_objective(const F& f, const GroupStructure& groups) {
  if (f.ground_size() != groups.num_groups()) {
    fail(ErrorKind::kDimensionMismatch,
         "objective ground size " + std::to_string(f.ground_size()) +
             " does not match group count " + std::to_string(groups.num_groups()));
  }
}

// Reweighted greedy continuing from `seed` (state and trace already built).
template <IncrementalObjective F>
SelectionResult reweighted_from(const F& f, const GroupStructure& groups,
                                int check_budget, typename F::State state,
                                SelectionResult seed, const GreedyOptions& opt) {
  std::vector<int> remaining;
  std::vector<char> in_seed(static_cast<std::size_t>(groups.num_groups()), 0);
  for (const auto& step : seed.trace) in_seed[static_cast<std::size_t>(step.element)] = 1;
  for (int g = 0; g < groups.num_groups(); ++g) {
    if (!in_seed[static_cast<std::size_t>(g)]) remaining.push_back(g);
  }
  std::vector<int> members;
  for (const auto& step : seed.trace) members.push_back(step.element);
  BudgetPolicy policy(groups, check_budget, cost(groups, members));
  run_greedy(f, std::move(state), std::move(remaining), policy, CostScore{&groups},
             opt, seed);
  return seed;
}

// Builds the state and trace for `members` in the given order.
template <IncrementalObjective F>
std::pair<typename F::State, SelectionResult> build_path(const F& f,
                                                        const std::vector<int>& members) {
  auto state = f.initial_state();
  SelectionResult out;
  double value = 0.0;
  std::vector<int> order;
  for (int e : members) {
    try {
      state = f.extend(state, e);
    } catch (const Error&) {
      rethrow_as_objective_failure(order, e);
    }
    ++out.evaluations;
    order.push_back(e);
    const double next = f.state_value(state);
    out.trace.push_back({e, next - value, next});
    value = next;
  }
  out.selected = members;
  std::sort(out.selected.begin(), out.selected.end());
  out.objective_value = value;
  return {std::move(state), std::move(out)};
}

}  // namespace detail

// Greedy over a uniform or partition matroid: at each step the element of
// largest marginal gain is removed from the ground set and kept when the
// result stays independent. Achieves at least 1/2 of the optimum for
// monotone submodular objectives (1 - 1/e for the uniform matroid).
template <IncrementalObjective F>
SelectionResult greedy_matroid(const F& f, std::vector<int> ground,
                               const SupportConstraint& constraint,
                               const GreedyOptions& opt = {}) {
  if (!constraint.is_matroid()) {
    fail(ErrorKind::kInvalidArgument,
         "greedy_matroid requires a uniform or partition matroid, got " +
             constraint.kind());
  }
  if (constraint.ground_size() != f.ground_size()) {
    fail(ErrorKind::kDimensionMismatch, "constraint and objective ground sizes differ");
  }
  ground = detail::normalized_ground(std::move(ground), f.ground_size());
  detail::OraclePolicy policy(constraint, {});
  SelectionResult out;
  detail::run_greedy(f, f.initial_state(), std::move(ground), policy,
                     detail::IdentityScore{}, opt, out);
  return out;
}

template <IncrementalObjective F>
SelectionResult greedy_matroid(const F& f, const SupportConstraint& constraint,
                               const GreedyOptions& opt = {}) {
  return greedy_matroid(f, detail::full_ground(f), constraint, opt);
}

// Partition-matroid greedy with per-view counters; element e is kept while
// its view has selected fewer than caps[view] elements. Same output as
// greedy_matroid with the equivalent PartitionMatroid.
template <IncrementalObjective F>
SelectionResult greedy_multiview(const F& f, const std::vector<std::vector<int>>& views,
                                 const std::vector<int>& caps,
                                 const GreedyOptions& opt = {}) {
  if (views.size() != caps.size()) {
    fail(ErrorKind::kInvalidArgument, "multiview greedy: one cap per view required");
  }
  std::vector<int> view_of(static_cast<std::size_t>(f.ground_size()), -1);
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (caps[v] < 0) fail(ErrorKind::kInvalidArgument, "multiview greedy: negative cap");
    for (int e : views[v]) {
      if (e < 0 || e >= f.ground_size()) {
        fail(ErrorKind::kInvalidArgument,
             "multiview greedy: element " + std::to_string(e) + " outside ground set");
      }
      auto& slot = view_of[static_cast<std::size_t>(e)];
      if (slot != -1) {
        fail(ErrorKind::kInvalidArgument,
             "multiview greedy: element " + std::to_string(e) + " in two views");
      }
      slot = static_cast<int>(v);
    }
  }
  for (int e = 0; e < f.ground_size(); ++e) {
    if (view_of[static_cast<std::size_t>(e)] == -1) {
      fail(ErrorKind::kInvalidArgument,
           "multiview greedy: element " + std::to_string(e) + " has no view assignment");
    }
  }
  detail::MultiviewPolicy policy(std::move(view_of), caps);
  SelectionResult out;
  detail::run_greedy(f, f.initial_state(), detail::full_ground(f), policy,
                     detail::IdentityScore{}, opt, out);
  return out;
}

// Cost-reweighted greedy over group ids starting from `init`. Picks the best
// gain/cost group, keeps it if the total cost stays within `budget`, drops it
// from the candidates either way.
template <IncrementalObjective F>
SelectionResult reweighted_greedy(const F& f, const GroupStructure& groups, int budget,
                                  std::vector<int> init, const GreedyOptions& opt = {}) {
  detail::check_group_objective(f, groups);
  if (budget < 0) fail(ErrorKind::kInvalidArgument, "reweighted greedy: negative budget");
  for (int g : init) groups.check_group(g);
  if (cost(groups, init) > budget) {
    fail(ErrorKind::kInfeasible, "reweighted greedy: initial groups " +
                                     format_indices(init) + " exceed budget " +
                                     std::to_string(budget));
  }
  auto [state, seed] = detail::build_path(f, init);
  return detail::reweighted_from(f, groups, budget, std::move(state), std::move(seed), opt);
}

// Greedy with partial enumeration under a knapsack over groups. The best set
// of fewer than m groups is compared with the best reweighted-greedy
// completion of every feasible m-group seed. m = 3 gives a (1 - 1/e)
// guarantee at O(r^3) completions. m = 1 is a fast mode: one reweighted run
// from the empty set against the best feasible single group, no guarantee.
template <IncrementalObjective F>
SelectionResult greedy_partial_enum(const F& f, const GroupStructure& groups, int budget,
                                    const PartialEnumOptions& opt = {}) {
  detail::check_group_objective(f, groups);
  if (opt.m < 1) fail(ErrorKind::kInvalidArgument, "partial enumeration: m must be >= 1");
  if (budget < 0) fail(ErrorKind::kInvalidArgument, "partial enumeration: negative budget");
  const int r = groups.num_groups();
  const double tol = opt.greedy.tie_tolerance;

  if (opt.m == 1) {
    auto greedy = detail::reweighted_from(f, groups, budget, f.initial_state(),
                                          SelectionResult{}, opt.greedy);
    std::int64_t evals = greedy.evaluations;
    SelectionResult best_single;
    for (int g = 0; g < r; ++g) {
      if (groups.group_cost(g) > budget) continue;
      auto [state, single] = detail::build_path(f, std::vector<int>{g});
      evals += single.evaluations;
      if (detail::strictly_better(single.objective_value, best_single.objective_value, tol)) {
        best_single = std::move(single);
      }
    }
    auto& winner = detail::strictly_better(best_single.objective_value,
                                           greedy.objective_value, tol)
                       ? best_single
                       : greedy;
    winner.evaluations = evals;
    return winner;
  }

  const int completion_budget = opt.compat_budget ? budget - opt.m - 1 : budget;
  SelectionResult small_best;  // S1, starts at the empty set
  SelectionResult completed;   // S2, starts at the empty set
  std::int64_t evals = 0;

  using State = typename F::State;
  std::vector<int> path;
  std::vector<SelectionStep> steps;

  auto snapshot = [&](double value) {
    SelectionResult s;
    s.trace = steps;
    s.selected = path;
    s.objective_value = value;
    return s;
  };

  auto visit = [&](auto&& self, int start, const State& state, double value,
                   int spent) -> void {
    for (int g = start; g < r; ++g) {
      const int c = groups.group_cost(g);
      if (spent + c > budget) continue;
      State next;
      try {
        next = f.extend(state, g);
      } catch (const Error&) {
        detail::rethrow_as_objective_failure(path, g);
      }
      ++evals;
      const double next_value = f.state_value(next);
      path.push_back(g);
      steps.push_back({g, next_value - value, next_value});
      if (static_cast<int>(path.size()) < opt.m) {
        if (detail::strictly_better(next_value, small_best.objective_value, tol)) {
          small_best = snapshot(next_value);
        }
        self(self, g + 1, next, next_value, spent + c);
      } else {
        auto candidate = detail::reweighted_from(f, groups, completion_budget, next,
                                                 snapshot(next_value), opt.greedy);
        evals += candidate.evaluations;
        if (completed.objective_value <= candidate.objective_value) {
          completed = std::move(candidate);
        }
      }
      path.pop_back();
      steps.pop_back();
    }
  };
  visit(visit, 0, f.initial_state(), 0.0, 0);

  auto& winner = completed.objective_value > small_best.objective_value ? completed
                                                                        : small_best;
  std::sort(winner.selected.begin(), winner.selected.end());
  winner.evaluations = evals;
  return winner;
}

// Exact maximizer over the independent subsets of `ground`, enumerated in
// lexicographic order; ties keep the lexicographically smallest set. Throws
// kEnumerationLimit once more than `cap` sets have been visited.
template <IncrementalObjective F>
SelectionResult brute_force_max(const F& f, std::vector<int> ground,
                                const SupportConstraint& constraint,
                                std::int64_t cap = kDefaultEnumerationCap,
                                double tie_tolerance = 1e-12) {
  if (constraint.ground_size() != f.ground_size()) {
    fail(ErrorKind::kDimensionMismatch, "constraint and objective ground sizes differ");
  }
  ground = detail::normalized_ground(std::move(ground), f.ground_size());
  using State = typename F::State;
  SelectionResult best;
  std::int64_t visited = 1;  // the empty set
  std::vector<int> path;
  std::vector<SelectionStep> steps;

  auto visit = [&](auto&& self, std::size_t start, const State& state, double value) -> void {
    for (std::size_t i = start; i < ground.size(); ++i) {
      const int e = ground[i];
      path.push_back(e);
      if (!constraint.is_independent(path)) {
        path.pop_back();
        continue;
      }
      if (++visited > cap) {
        fail(ErrorKind::kEnumerationLimit,
             "brute force: more than " + std::to_string(cap) +
                 " feasible sets; instance too large for the exact oracle");
      }
      State next;
      try {
        next = f.extend(state, e);
      } catch (const Error&) {
        path.pop_back();
        detail::rethrow_as_objective_failure(path, e);
      }
      const double next_value = f.state_value(next);
      steps.push_back({e, next_value - value, next_value});
      if (detail::strictly_better(next_value, best.objective_value, tie_tolerance)) {
        best.selected = path;
        best.trace = steps;
        best.objective_value = next_value;
      }
      self(self, i + 1, next, next_value);
      path.pop_back();
      steps.pop_back();
    }
  };
  visit(visit, 0, f.initial_state(), 0.0);
  best.evaluations = visited - 1;
  return best;
}

template <IncrementalObjective F>
SelectionResult brute_force_max(const F& f, const SupportConstraint& constraint,
                                std::int64_t cap = kDefaultEnumerationCap) {
  return brute_force_max(f, detail::full_ground(f), constraint, cap);
}

}  // namespace infoproj
