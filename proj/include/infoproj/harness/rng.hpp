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

// Seeded random streams. Each component draws from its own mt19937_64 whose
// seed is derived from the run seed and a component id, so adding draws to
// one component never shifts another.

#pragma once

#include <cstdint>
#include <random>

namespace infoproj {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t {
  kDesign = 1,
  kCoefficients = 2,
  kNoise = 3,
  kSplit = 4,
  kPlanted = 5,
  kInstance = 6,
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t component,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ component) ^ index);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream s, std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(seed, static_cast<std::uint64_t>(s), index));
}

}  // namespace infoproj
