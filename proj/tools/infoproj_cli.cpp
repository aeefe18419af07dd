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

// Command line front end: one subcommand per task. Flags override the values
// of an optional JSON config file.

#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "infoproj/harness/runner.hpp"

namespace {

using infoproj::Json;

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;
  std::string input;
  std::vector<std::string> views;
  std::string precision, potential, constraint, edges;
  int budget = 0;
  std::vector<int> caps;
  std::string groups;
  int m = 3;
  bool lazy = false, compat_budget = false, paper_literal_metric = false;
  bool center = true, per_view_noise = false;
  double sigma2 = 1.0, prior_variance = 1.0, spatial_jitter = 1e-3, tol = 1e-8, bf_threshold = 0;
  int max_iters = 100;
  int d = 0, n = 0, num_groups = 0, group_size = 0, seeds = 0, instances = 0;
  double snr = 0;
  std::vector<double> snr_list;
  std::string format, bench_mode;
};

// Registers `--name` on `app` and records it so that only flags given on the
// command line land in the overlay.
class Overlay {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& key, T& target,
                   const std::string& help) {
    CLI::Option* opt = app->add_option("--" + name, target, help);
    entries_.push_back({opt, [key, &target](Json& j) { j[key] = target; }});
    return opt;
  }

  void apply(Json& j) const {
    for (const auto& e : entries_)
      if (e.option->count() > 0) e.write(j);
  }

 private:
  struct Entry {
    CLI::Option* option;
    std::function<void(Json&)> write;
  };
  std::vector<Entry> entries_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured-sparse information projection of Gaussian densities"};
  app.require_subcommand(1);
  Flags f;
  Overlay overlay;

  const std::vector<std::pair<std::string, std::string>> tasks{
      {"project", "project a Gaussian density onto a constrained support"},
      {"regress", "group-sparse Bayesian linear regression"},
      {"pca", "group-sparse probabilistic PCA"},
      {"cca", "sparse probabilistic CCA over stacked views"},
      {"synth", "generate planted group-sparse regression data"},
      {"bench", "SNR sweep or approximation-ratio benchmark"}};

  for (const auto& [name, help] : tasks) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", f.config, "JSON config file; flags override its values");
    overlay.add(sub, "seed", "seed", f.seed, "64-bit seed");
    overlay.add(sub, "out", "out", f.out, "output directory");
    overlay.add(sub, "threads", "threads", f.threads, "worker threads for gain evaluation");
    overlay.add(sub, "budget", "budget", f.budget, "budget k");
    overlay.add(sub, "caps", "caps", f.caps, "per-view caps k1,k2,...")->delimiter(',');
    overlay.add(sub, "groups", "groups", f.groups, "group file or uniform:SIZE");
    overlay.add(sub, "m", "m", f.m, "partial enumeration depth");
    overlay.add(sub, "lazy", "lazy", f.lazy, "lazy greedy evaluation (true/false)");
    overlay.add(sub, "compat-budget", "compat_budget", f.compat_budget,
                "completion budget k - m - 1 (true/false)");
    overlay.add(sub, "paper-literal-metric", "paper_literal_metric", f.paper_literal_metric,
                "also report the literal cross-variance (true/false)");
    overlay.add(sub, "bf-threshold", "bf_threshold", f.bf_threshold,
                "log Bayes factor threshold for the k estimate");
    if (name == "project") {
      overlay.add(sub, "precision", "precision", f.precision, "precision matrix file");
      overlay.add(sub, "potential", "potential", f.potential, "potential vector file");
      overlay.add(sub, "constraint", "constraint", f.constraint, "uniform, partition or knapsack");
    }
    if (name == "regress" || name == "pca") {
      overlay.add(sub, "input", "input", f.input,
                  name == "regress" ? "data directory (as written by synth)" : "data matrix file");
    }
    if (name == "cca") {
      overlay.add(sub, "views", "views", f.views, "view matrix files P1,P2,...")->delimiter(',');
      overlay.add(sub, "per-view-noise", "per_view_noise", f.per_view_noise,
                  "one noise variance per view (true/false)");
    }
    if (name == "regress") {
      overlay.add(sub, "sigma2", "sigma2", f.sigma2, "noise variance");
    }
    if (name == "regress" || name == "pca" || name == "cca" || name == "bench") {
      overlay.add(sub, "prior-variance", "prior_variance", f.prior_variance,
                  "isotropic prior variance");
    }
    if (name == "pca") {
      overlay.add(sub, "edges", "edges", f.edges, "edge list for a graph Laplacian prior");
      overlay.add(sub, "spatial-jitter", "spatial_jitter", f.spatial_jitter,
                  "diagonal added to the Laplacian");
    }
    if (name == "pca" || name == "cca") {
      overlay.add(sub, "center", "center", f.center, "center columns (true/false)");
      overlay.add(sub, "max-iters", "max_iters", f.max_iters, "EM iterations");
      overlay.add(sub, "tol", "tol", f.tol, "EM tolerance on the free energy");
    }
    if (name == "synth" || name == "bench") {
      overlay.add(sub, "d", "d", f.d, "dimension");
      overlay.add(sub, "n", "n", f.n, "samples");
      overlay.add(sub, "num-groups", "num_groups", f.num_groups, "planted groups");
      overlay.add(sub, "group-size", "group_size", f.group_size, "coordinates per group");
    }
    if (name == "synth") {
      overlay.add(sub, "snr", "snr", f.snr, "signal-to-noise ratio");
      overlay.add(sub, "format", "format", f.format, "csv or bin");
    }
    if (name == "bench") {
      overlay.add(sub, "snr-list", "snr_list", f.snr_list, "SNR values")->delimiter(',');
      overlay.add(sub, "seeds", "seeds", f.seeds, "repetitions per SNR");
      overlay.add(sub, "mode", "bench_mode", f.bench_mode, "snr or ratios");
      overlay.add(sub, "instances", "instances", f.instances, "instances for ratio mode");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << infoproj::error_json(infoproj::kExitUsage, "usage", e.what()) << "\n";
    return infoproj::kExitUsage;
  }

  const std::string task = app.get_subcommands().front()->get_name();
  infoproj::ExperimentConfig config;
  try {
    Json j = Json::object();
    if (!f.config.empty()) j = infoproj::read_json_file(f.config);
    if (!j.is_object()) infoproj::fail(infoproj::ErrorKind::kSchema, "config must be a JSON object");
    if (j.contains("task") && j["task"] != task) {
      infoproj::fail(infoproj::ErrorKind::kSchema,
                     "config task '" + j["task"].dump() + "' does not match subcommand " + task);
    }
    j["task"] = task;
    overlay.apply(j);
    config = infoproj::parse_config(j);
  } catch (const infoproj::Error& e) {
    const int code = infoproj::exit_code_for(e.kind());
    std::cerr << infoproj::error_json(code, infoproj::to_string(e.kind()), e.what()) << "\n";
    return code;
  }
  return infoproj::run_cli(config, std::cerr);
}
