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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "infoproj/errors.hpp"

namespace infoproj {

// Formats a list of indices as "{a, b, c}" for error messages.
inline std::string format_indices(std::span<const int> indices) {
  std::string out = "{";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(indices[i]);
  }
  return out + "}";
}

// A set of coordinate indices, stored strictly increasing. The complement
// with respect to the ambient dimension is implicit.
class SupportSet {
 public:
  SupportSet() = default;

  // Accepts indices in any order; duplicates and negative values are rejected.
  explicit SupportSet(std::vector<int> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if (!indices_.empty() && indices_.front() < 0) {
      fail(ErrorKind::kInvalidSupport,
           "negative index in support " + format_indices(indices_));
    }
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
      fail(ErrorKind::kInvalidSupport,
           "duplicate index in support " + format_indices(indices_));
    }
  }

  SupportSet(std::initializer_list<int> indices)
      : SupportSet(std::vector<int>(indices)) {}

  static SupportSet full(int dim) {
    std::vector<int> all(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) all[static_cast<std::size_t>(i)] = i;
    return SupportSet(std::move(all));
  }

  const std::vector<int>& indices() const noexcept { return indices_; }
  int size() const noexcept { return static_cast<int>(indices_.size()); }
  bool empty() const noexcept { return indices_.empty(); }
  int operator[](int i) const { return indices_[static_cast<std::size_t>(i)]; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  bool contains(int index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
  }

  // Throws unless every index lies in [0, dim).
  void check_within(int dim) const {
    if (!indices_.empty() && indices_.back() >= dim) {
      fail(ErrorKind::kInvalidSupport,
           "support index " + std::to_string(indices_.back()) +
               " out of range for dimension " + std::to_string(dim));
    }
  }

  SupportSet complement(int dim) const {
    check_within(dim);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(dim - size()));
    for (int i = 0; i < dim; ++i) {
      if (!contains(i)) out.push_back(i);
    }
    return SupportSet(std::move(out));
  }

  SupportSet united(const SupportSet& other) const {
    std::vector<int> out;
    std::set_union(begin(), end(), other.begin(), other.end(),
                   std::back_inserter(out));
    return SupportSet(std::move(out));
  }

  SupportSet intersected(const SupportSet& other) const {
    std::vector<int> out;
    std::set_intersection(begin(), end(), other.begin(), other.end(),
                          std::back_inserter(out));
    return SupportSet(std::move(out));
  }

  bool disjoint_from(const SupportSet& other) const {
    return intersected(other).empty();
  }

  std::string to_string() const { return format_indices(indices_); }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<int> indices_;
};

}  // namespace infoproj
