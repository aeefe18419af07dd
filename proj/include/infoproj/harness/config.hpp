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

// Experiment configuration: a JSON object whose keys mirror the CLI flags
// (snake_case). Unknown keys and mistyped values are schema errors.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "infoproj/errors.hpp"
#include "infoproj/harness/metrics.hpp"
#include "json.hpp"

namespace infoproj {

using Json = nlohmann::ordered_json;

inline const std::set<std::string>& known_tasks() {
  static const std::set<std::string> tasks{"project", "regress", "pca", "cca", "synth", "bench"};
  return tasks;
}

struct ExperimentConfig {
  std::string task;
  std::uint64_t seed = 0;
  std::string out = ".";
  int threads = 1;

  // Inputs.
  std::string input;               // regress: data directory; pca: data matrix
  std::vector<std::string> views;  // cca: one matrix per view
  std::string precision;           // project
  std::string potential;           // project
  std::string constraint = "uniform";  // project: uniform | partition | knapsack
  std::string edges;                   // pca: spatial prior edge list

  // Constraint.
  std::optional<int> budget;
  std::vector<int> caps;
  Json groups;  // null, "uniform:SIZE", a file path, or an array of index arrays

  // Solver.
  int m = 3;
  bool lazy = false;
  bool compat_budget = false;

  // Models.
  std::optional<double> sigma2;
  double prior_variance = 1.0;
  double spatial_jitter = 1e-3;
  bool center = true;
  bool per_view_noise = false;
  int max_iters = 100;
  double tol = 1e-8;
  double bf_threshold = kStrongEvidenceLogBF;
  bool paper_literal_metric = false;

  // Synthetic data and benchmarks.
  std::optional<int> d;
  std::optional<int> n;
  int num_groups = 5;
  int group_size = 4;
  double snr = 10000.0;
  std::vector<double> snr_list{10000.0, 1000.0, 100.0, 10.0, 1.0, 0.1};
  int seeds = 10;
  std::string format = "csv";
  std::string bench_mode = "snr";  // snr | ratios
  int instances = 20;
};

namespace detail {

template <class T>
T json_get(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::kSchema, std::string("config: key '") + key + "' has the wrong type");
  }
}

template <class T>
void json_read(const Json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = json_get<T>(j, key);
}

template <class T>
void json_read(const Json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = json_get<T>(j, key);
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) fail(ErrorKind::kSchema, "config: " + msg);
}

}  // namespace detail

inline ExperimentConfig parse_config(const Json& j) {
  static const std::set<std::string> keys{
      "task", "seed", "out", "threads", "input", "views", "precision", "potential",
      "constraint", "edges", "budget", "caps", "groups", "m", "lazy", "compat_budget",
      "sigma2", "prior_variance", "spatial_jitter", "center", "per_view_noise",
      "max_iters", "tol", "bf_threshold", "paper_literal_metric", "d", "n", "num_groups",
      "group_size", "snr", "snr_list", "seeds", "format", "bench_mode", "instances"};
  detail::require(j.is_object(), "top level must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    detail::require(keys.count(key) == 1, "unknown key '" + key + "'");
  }
  ExperimentConfig c;
  using detail::json_read;
  json_read(j, "task", c.task);
  json_read(j, "seed", c.seed);
  json_read(j, "out", c.out);
  json_read(j, "threads", c.threads);
  json_read(j, "input", c.input);
  json_read(j, "views", c.views);
  json_read(j, "precision", c.precision);
  json_read(j, "potential", c.potential);
  json_read(j, "constraint", c.constraint);
  json_read(j, "edges", c.edges);
  json_read(j, "budget", c.budget);
  json_read(j, "caps", c.caps);
  if (j.contains("groups")) c.groups = j.at("groups");
  json_read(j, "m", c.m);
  json_read(j, "lazy", c.lazy);
  json_read(j, "compat_budget", c.compat_budget);
  json_read(j, "sigma2", c.sigma2);
  json_read(j, "prior_variance", c.prior_variance);
  json_read(j, "spatial_jitter", c.spatial_jitter);
  json_read(j, "center", c.center);
  json_read(j, "per_view_noise", c.per_view_noise);
  json_read(j, "max_iters", c.max_iters);
  json_read(j, "tol", c.tol);
  json_read(j, "bf_threshold", c.bf_threshold);
  json_read(j, "paper_literal_metric", c.paper_literal_metric);
  json_read(j, "d", c.d);
  json_read(j, "n", c.n);
  json_read(j, "num_groups", c.num_groups);
  json_read(j, "group_size", c.group_size);
  json_read(j, "snr", c.snr);
  json_read(j, "snr_list", c.snr_list);
  json_read(j, "seeds", c.seeds);
  json_read(j, "format", c.format);
  json_read(j, "bench_mode", c.bench_mode);
  json_read(j, "instances", c.instances);

  detail::require(known_tasks().count(c.task) == 1, "task must be one of project, regress, "
                                                    "pca, cca, synth, bench");
  detail::require(c.threads >= 1, "threads must be >= 1");
  detail::require(c.m >= 1, "m must be >= 1");
  detail::require(!c.budget || *c.budget >= 0, "budget must be >= 0");
  for (int k : c.caps) detail::require(k >= 0, "caps must be >= 0");
  detail::require(c.constraint == "uniform" || c.constraint == "partition" ||
                      c.constraint == "knapsack",
                  "constraint must be uniform, partition or knapsack");
  detail::require(!c.sigma2 || *c.sigma2 > 0, "sigma2 must be > 0");
  detail::require(c.prior_variance > 0, "prior_variance must be > 0");
  detail::require(c.spatial_jitter > 0, "spatial_jitter must be > 0");
  detail::require(c.max_iters >= 0, "max_iters must be >= 0");
  detail::require(c.tol >= 0, "tol must be >= 0");
  detail::require(!c.d || *c.d > 0, "d must be > 0");
  detail::require(!c.n || *c.n > 0, "n must be > 0");
  detail::require(c.num_groups >= 0 && c.group_size > 0, "num_groups >= 0 and group_size > 0");
  detail::require(c.snr > 0, "snr must be > 0");
  for (double s : c.snr_list) detail::require(s > 0, "snr_list entries must be > 0");
  detail::require(c.seeds >= 1 && c.instances >= 1, "seeds and instances must be >= 1");
  detail::require(c.format == "csv" || c.format == "bin", "format must be csv or bin");
  detail::require(c.bench_mode == "snr" || c.bench_mode == "ratios",
                  "bench_mode must be snr or ratios");
  return c;
}

// Resolved configuration for result.json. Output location and thread count do
// not affect results and are left out, so runs differing only in those compare
// equal.
inline Json config_echo(const ExperimentConfig& c) {
  Json j;
  j["task"] = c.task;
  j["seed"] = c.seed;
  if (!c.input.empty()) j["input"] = c.input;
  if (!c.views.empty()) j["views"] = c.views;
  if (!c.precision.empty()) j["precision"] = c.precision;
  if (!c.potential.empty()) j["potential"] = c.potential;
  if (c.task == "project") j["constraint"] = c.constraint;
  if (!c.edges.empty()) j["edges"] = c.edges;
  j["budget"] = c.budget ? Json(*c.budget) : Json(nullptr);
  j["caps"] = c.caps;
  j["groups"] = c.groups;
  j["m"] = c.m;
  j["lazy"] = c.lazy;
  j["compat_budget"] = c.compat_budget;
  j["sigma2"] = c.sigma2 ? Json(*c.sigma2) : Json(nullptr);
  j["prior_variance"] = c.prior_variance;
  j["spatial_jitter"] = c.spatial_jitter;
  j["center"] = c.center;
  j["per_view_noise"] = c.per_view_noise;
  j["max_iters"] = c.max_iters;
  j["tol"] = c.tol;
  j["bf_threshold"] = c.bf_threshold;
  j["paper_literal_metric"] = c.paper_literal_metric;
  j["d"] = c.d ? Json(*c.d) : Json(nullptr);
  j["n"] = c.n ? Json(*c.n) : Json(nullptr);
  j["num_groups"] = c.num_groups;
  j["group_size"] = c.group_size;
  j["snr"] = c.snr;
  j["snr_list"] = c.snr_list;
  j["seeds"] = c.seeds;
  j["format"] = c.format;
  j["bench_mode"] = c.bench_mode;
  j["instances"] = c.instances;
  return j;
}

}  // namespace infoproj
