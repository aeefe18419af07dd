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

// Feasibility structures for support selection: disjoint coordinate groups
// with costs, and the independence systems over which the greedy solvers
// run (uniform matroid, partition matroid, group knapsack).

#pragma once

#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "infoproj/errors.hpp"
#include "infoproj/support.hpp"

namespace infoproj {

// Disjoint groups G_0..G_{r-1} over coordinates [0, dim). Groups need not
// cover every coordinate. Default cost of a group is its size.
class GroupStructure {
 public:
  GroupStructure() = default;

  GroupStructure(int dim, std::vector<std::vector<int>> groups,
                 std::optional<std::vector<int>> costs = std::nullopt)
      : dim_(dim), owner_(static_cast<std::size_t>(std::max(dim, 0)), -1) {
    if (dim < 0) fail(ErrorKind::kInvalidArgument, "group structure: negative dimension");
    groups_.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      SupportSet members(std::move(groups[g]));
      members.check_within(dim);
      for (int i : members) {
        auto& slot = owner_[static_cast<std::size_t>(i)];
        if (slot != -1) {
          fail(ErrorKind::kInvalidArgument,
               "groups " + std::to_string(slot) + " and " + std::to_string(g) +
                   " overlap at coordinate " + std::to_string(i));
        }
        slot = static_cast<int>(g);
      }
      groups_.push_back(std::move(members));
    }
    if (costs) {
      if (costs->size() != groups_.size()) {
        fail(ErrorKind::kInvalidArgument, "group costs: expected one cost per group");
      }
      for (int c : *costs) {
        if (c <= 0) fail(ErrorKind::kInvalidArgument, "group costs must be positive");
      }
      costs_ = std::move(*costs);
    } else {
      costs_.reserve(groups_.size());
      for (const auto& g : groups_) costs_.push_back(g.size());
    }
  }

  // Consecutive blocks of `size` coordinates; the last block may be shorter.
  static GroupStructure uniform_blocks(int dim, int size) {
    if (size <= 0) fail(ErrorKind::kInvalidArgument, "block size must be positive");
    std::vector<std::vector<int>> groups;
    for (int start = 0; start < dim; start += size) {
      std::vector<int> g;
      for (int i = start; i < std::min(dim, start + size); ++i) g.push_back(i);
      groups.push_back(std::move(g));
    }
    return GroupStructure(dim, std::move(groups));
  }

  static GroupStructure singletons(int dim) { return uniform_blocks(dim, 1); }

  int dim() const noexcept { return dim_; }
  int num_groups() const noexcept { return static_cast<int>(groups_.size()); }
  const SupportSet& group(int g) const { check_group(g); return groups_[static_cast<std::size_t>(g)]; }
  int group_cost(int g) const { check_group(g); return costs_[static_cast<std::size_t>(g)]; }
  const std::vector<int>& costs() const noexcept { return costs_; }

  // Group owning coordinate i, or -1.
  int owner(int i) const { return owner_.at(static_cast<std::size_t>(i)); }

  void check_group(int g) const {
    if (g < 0 || g >= num_groups()) {
      fail(ErrorKind::kInvalidArgument, "unknown group id " + std::to_string(g));
    }
  }

 private:
  int dim_ = 0;
  std::vector<SupportSet> groups_;
  std::vector<int> costs_;
  std::vector<int> owner_;
};

// c(s) = sum of member costs.
inline int cost(const GroupStructure& g, std::span<const int> s) {
  int total = 0;
  for (int id : s) total += g.group_cost(id);
  return total;
}

// G_S = union of member groups, sorted.
inline SupportSet expand_groups(const GroupStructure& g, std::span<const int> s) {
  std::vector<int> out;
  for (int id : s) {
    const auto& members = g.group(id).indices();
    out.insert(out.end(), members.begin(), members.end());
  }
  return SupportSet(std::move(out));
}

class UniformMatroid {
 public:
  UniformMatroid(int ground_size, int k) : ground_size_(ground_size), k_(k) {
    if (k < 0) fail(ErrorKind::kInvalidArgument, "uniform matroid: k must be >= 0");
  }
  int ground_size() const noexcept { return ground_size_; }
  int k() const noexcept { return k_; }

 private:
  int ground_size_;
  int k_;
};

// Blocks X_0..X_{v-1} partitioning [0, ground_size) with per-block caps.
class PartitionMatroid {
 public:
  PartitionMatroid(int ground_size, std::vector<std::vector<int>> views,
                   std::vector<int> caps)
      : ground_size_(ground_size),
        caps_(std::move(caps)),
        view_of_(static_cast<std::size_t>(std::max(ground_size, 0)), -1) {
    if (views.size() != caps_.size()) {
      fail(ErrorKind::kInvalidArgument, "partition matroid: one cap per view required");
    }
    for (int c : caps_) {
      if (c < 0) fail(ErrorKind::kInvalidArgument, "partition matroid: caps must be >= 0");
    }
    for (std::size_t v = 0; v < views.size(); ++v) {
      SupportSet members(std::move(views[v]));
      members.check_within(ground_size);
      for (int e : members) {
        auto& slot = view_of_[static_cast<std::size_t>(e)];
        if (slot != -1) {
          fail(ErrorKind::kInvalidArgument,
               "partition matroid: element " + std::to_string(e) + " in two views");
        }
        slot = static_cast<int>(v);
      }
      views_.push_back(std::move(members));
    }
    for (int e = 0; e < ground_size; ++e) {
      if (view_of_[static_cast<std::size_t>(e)] == -1) {
        fail(ErrorKind::kInvalidArgument,
             "partition matroid: element " + std::to_string(e) + " has no view");
      }
    }
  }

  // Views as consecutive blocks of the given sizes.
  static PartitionMatroid from_block_sizes(std::span<const int> sizes,
                                           std::vector<int> caps) {
    std::vector<std::vector<int>> views;
    int next = 0;
    for (int s : sizes) {
      std::vector<int> block(static_cast<std::size_t>(s));
      std::iota(block.begin(), block.end(), next);
      next += s;
      views.push_back(std::move(block));
    }
    return PartitionMatroid(next, std::move(views), std::move(caps));
  }

  int ground_size() const noexcept { return ground_size_; }
  int num_views() const noexcept { return static_cast<int>(views_.size()); }
  const SupportSet& view(int v) const { return views_.at(static_cast<std::size_t>(v)); }
  const std::vector<int>& caps() const noexcept { return caps_; }
  int view_of(int e) const { return view_of_.at(static_cast<std::size_t>(e)); }

 private:
  int ground_size_;
  std::vector<SupportSet> views_;
  std::vector<int> caps_;
  std::vector<int> view_of_;
};

// Ground set is the group ids; a set is feasible when its cost fits the budget.
class GroupKnapsack {
 public:
  GroupKnapsack(GroupStructure groups, int budget)
      : groups_(std::move(groups)), budget_(budget) {
    if (budget < 0) fail(ErrorKind::kInvalidArgument, "knapsack: budget must be >= 0");
  }
  int ground_size() const noexcept { return groups_.num_groups(); }
  const GroupStructure& groups() const noexcept { return groups_; }
  int budget() const noexcept { return budget_; }

 private:
  GroupStructure groups_;
  int budget_;
};

// Tagged union of the supported constraint families. Independence checks are
// pure and the object is immutable.
class SupportConstraint {
 public:
  using Variant = std::variant<UniformMatroid, PartitionMatroid, GroupKnapsack>;

  SupportConstraint(UniformMatroid c) : v_(std::move(c)) {}
  SupportConstraint(PartitionMatroid c) : v_(std::move(c)) {}
  SupportConstraint(GroupKnapsack c) : v_(std::move(c)) {}

  const Variant& variant() const noexcept { return v_; }
  bool is_matroid() const noexcept { return !std::holds_alternative<GroupKnapsack>(v_); }

  std::string kind() const {
    switch (v_.index()) {
      case 0: return "uniform";
      case 1: return "partition";
      default: return "knapsack";
    }
  }

  int ground_size() const {
    return std::visit([](const auto& c) { return c.ground_size(); }, v_);
  }

  // Throws for elements outside the ground set or repeated elements.
  bool is_independent(std::span<const int> s) const {
    const int n = ground_size();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int e : s) {
      if (e < 0 || e >= n) {
        fail(ErrorKind::kInvalidArgument,
             "element " + std::to_string(e) + " outside ground set of size " +
                 std::to_string(n));
      }
      if (seen[static_cast<std::size_t>(e)]++) {
        fail(ErrorKind::kInvalidArgument, "element " + std::to_string(e) + " repeated");
      }
    }
    if (const auto* u = std::get_if<UniformMatroid>(&v_)) {
      return static_cast<int>(s.size()) <= u->k();
    }
    if (const auto* p = std::get_if<PartitionMatroid>(&v_)) {
      std::vector<int> counts(static_cast<std::size_t>(p->num_views()), 0);
      for (int e : s) {
        const int v = p->view_of(e);
        if (++counts[static_cast<std::size_t>(v)] > p->caps()[static_cast<std::size_t>(v)]) {
          return false;
        }
      }
      return true;
    }
    const auto& k = std::get<GroupKnapsack>(v_);
    return cost(k.groups(), s) <= k.budget();
  }

 private:
  Variant v_;
};

}  // namespace infoproj
