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

// Task dispatch for the command line tool. Every task fills an Artifacts
// record; run_cli writes it out as result.json, curves.csv and, when present,
// support.csv.

#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "infoproj/constraints.hpp"
#include "infoproj/errors.hpp"
#include "infoproj/gaussian.hpp"
#include "infoproj/harness/config.hpp"
#include "infoproj/harness/matrix_io.hpp"
#include "infoproj/harness/metrics.hpp"
#include "infoproj/harness/rng.hpp"
#include "infoproj/harness/spatial.hpp"
#include "infoproj/harness/synthetic.hpp"
#include "infoproj/models/latent_factor.hpp"
#include "infoproj/models/regression.hpp"
#include "infoproj/objective.hpp"
#include "infoproj/solvers.hpp"

namespace infoproj {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitIo = 3, kExitSolver = 4, kExitInternal = 5 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kSchema:
      return kExitUsage;
    case ErrorKind::kIo:
      return kExitIo;
    default:
      return kExitSolver;
  }
}

inline const char* exit_category(int code) {
  switch (code) {
    case kExitUsage: return "usage";
    case kExitIo: return "io";
    case kExitSolver: return "solver";
    default: return "internal";
  }
}

inline std::string error_json(int code, const std::string& kind, const std::string& message) {
  Json j;
  j["error"] = {{"category", exit_category(code)}, {"kind", kind}, {"message", message}};
  return j.dump();
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  bool empty() const { return header.empty(); }
};

struct Artifacts {
  Json result = Json::object();
  Json metrics = Json::object();
  Json timings = Json::object();
  Table curves;
  Table support;
};

class PhaseTimer {
 public:
  explicit PhaseTimer(Json& sink) : sink_(sink), last_(Clock::now()) {}
  void mark(const std::string& phase) {
    const auto now = Clock::now();
    sink_[phase + "_ms"] = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
  }

 private:
  using Clock = std::chrono::steady_clock;
  Json& sink_;
  Clock::time_point last_;
};

inline Json to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

inline Json trace_json(const SelectionResult& r) {
  Json out = Json::array();
  for (const auto& s : r.trace) out.push_back({{"element", s.element}, {"gain", s.gain}, {"value", s.value}});
  return out;
}

inline Table trace_table(const SelectionResult& r, const GroupStructure* groups = nullptr) {
  Table t;
  t.header = {"step", "element", "gain", "objective"};
  if (groups) t.header.push_back("cumulative_cost");
  double spent = 0;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& s = r.trace[i];
    std::vector<double> row{static_cast<double>(i + 1), static_cast<double>(s.element), s.gain, s.value};
    if (groups) {
      spent += groups->group_cost(s.element);
      row.push_back(spent);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table free_energy_table(const std::vector<double>& trace) {
  Table t;
  t.header = {"half_step", "phase", "free_energy"};  // phase 0 = E-step, 1 = M-step
  for (std::size_t i = 0; i < trace.size(); ++i) {
    t.rows.push_back({static_cast<double>(i + 1), static_cast<double>(i % 2), trace[i]});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Input resolution

inline std::vector<std::vector<int>> parse_index_lists(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorKind::kSchema, where + ": expected an array of index arrays");
  std::vector<std::vector<int>> out;
  for (const auto& g : j) {
    if (!g.is_array()) fail(ErrorKind::kSchema, where + ": each group must be an array");
    std::vector<int> members;
    for (const auto& i : g) {
      if (!i.is_number_integer()) fail(ErrorKind::kSchema, where + ": indices must be integers");
      members.push_back(i.get<int>());
    }
    out.push_back(std::move(members));
  }
  return out;
}

inline GroupStructure groups_from_json(const Json& j, int dim, const std::string& where) {
  if (j.is_object()) {
    if (!j.contains("groups")) fail(ErrorKind::kSchema, where + ": missing 'groups'");
    std::optional<std::vector<int>> costs;
    if (j.contains("costs")) {
      try {
        costs = j.at("costs").get<std::vector<int>>();
      } catch (const nlohmann::json::exception&) {
        fail(ErrorKind::kSchema, where + ": costs must be integers");
      }
    }
    return GroupStructure(dim, parse_index_lists(j.at("groups"), where), costs);
  }
  return GroupStructure(dim, parse_index_lists(j, where));
}

// null -> singletons; "uniform:SIZE"; a .json file; a CSV file with one group
// per record; or an inline array of index arrays.
inline GroupStructure resolve_groups(const Json& spec, int dim) {
  if (spec.is_null()) return GroupStructure::singletons(dim);
  if (spec.is_array() || spec.is_object()) return groups_from_json(spec, dim, "groups");
  if (!spec.is_string()) fail(ErrorKind::kSchema, "groups: expected a string or an array");
  const std::string s = spec.get<std::string>();
  if (s.rfind("uniform:", 0) == 0) {
    int size = 0;
    const auto tail = std::string_view(s).substr(8);
    const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), size);
    if (res.ec != std::errc() || res.ptr != tail.data() + tail.size() || size <= 0) {
      fail(ErrorKind::kSchema, "groups: bad block size in '" + s + "'");
    }
    return GroupStructure::uniform_blocks(dim, size);
  }
  const fs::path path(s);
  const std::string text = io::read_text(path);
  if (path.extension() == ".json") {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kSchema, s + ": " + e.what());
    }
    return groups_from_json(j, dim, s);
  }
  std::vector<std::vector<int>> groups;
  for (const auto& record : io::detail::parse_csv(text, s)) {
    std::vector<int> g;
    for (const auto& field : record) {
      double v = 0;
      if (!io::detail::parse_double(field, v) || v != std::floor(v)) {
        fail(ErrorKind::kSchema, s + ": group members must be integers");
      }
      g.push_back(static_cast<int>(v));
    }
    groups.push_back(std::move(g));
  }
  return GroupStructure(dim, std::move(groups));
}

inline Json groups_to_json(const GroupStructure& g) {
  Json groups = Json::array();
  for (int i = 0; i < g.num_groups(); ++i) groups.push_back(g.group(i).indices());
  return {{"groups", groups}, {"costs", g.costs()}};
}

inline Json read_json_file(const fs::path& path) {
  try {
    return Json::parse(io::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kSchema, path.string() + ": " + e.what());
  }
}

// `stem`.bin if present, else `stem`.csv.
inline std::optional<fs::path> find_matrix(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".bin", ".csv"}) {
    const fs::path p = dir / (stem + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

inline Eigen::MatrixXd center_columns(Eigen::MatrixXd t) {
  t.rowwise() -= t.colwise().mean();
  return t;
}

inline PartialEnumOptions solver_options(const ExperimentConfig& c) {
  PartialEnumOptions opt;
  opt.m = c.m;
  opt.compat_budget = c.compat_budget;
  opt.greedy.lazy = c.lazy;
  opt.greedy.threads = c.threads;
  return opt;
}

// ---------------------------------------------------------------------------
// Regression protocol

struct RegressionData {
  Eigen::MatrixXd Z;
  Eigen::VectorXd y;
  std::optional<Eigen::VectorXd> beta;  // truth, for support AUC
  std::vector<int> split;               // empty: every row trains
  GroupStructure groups;
};

struct RegressionProtocolOptions {
  int budget = 0;
  double sigma2 = 1.0;
  double prior_variance = 1.0;
  PartialEnumOptions solver;
  double bf_threshold = kStrongEvidenceLogBF;
};

struct RegressionReport {
  RegressionSelection selection;
  double r2_train = 0.0;
  std::optional<double> r2_test;
  std::optional<double> support_auc;
  std::optional<int> k_bayes_factor;
};

// Fits on the training rows, scores R^2 on the test rows and the support
// against the true nonzeros (selected coordinates score 1, others 0).
inline RegressionReport run_regression_protocol(const RegressionData& data,
                                                const RegressionProtocolOptions& opt) {
  std::vector<int> train, test;
  if (data.split.empty()) {
    for (int i = 0; i < data.Z.rows(); ++i) train.push_back(i);
  } else {
    if (static_cast<Eigen::Index>(data.split.size()) != data.Z.rows()) {
      fail(ErrorKind::kDimensionMismatch, "regression: split length != rows");
    }
    train = rows_in(data.split, Split::kTrain);
    test = rows_in(data.split, Split::kTest);
  }
  if (train.empty()) fail(ErrorKind::kInvalidArgument, "regression: no training rows");
  RegressionModel model;
  model.Z = data.Z(train, Eigen::all);
  model.y = data.y(train);
  model.prior = GaussianPrior::isotropic(static_cast<int>(data.Z.cols()), opt.prior_variance);
  model.sigma2 = opt.sigma2;
  model.groups = data.groups;
  model.budget = opt.budget;

  RegressionReport out;
  out.selection = select_groups_regression(model, opt.solver);
  out.r2_train = metric_r2(model.y, predict(out.selection.projected, model.Z));
  if (!test.empty()) {
    out.r2_test = metric_r2(data.y(test), predict(out.selection.projected, data.Z(test, Eigen::all)));
  }
  if (data.beta) {
    std::vector<bool> truth(static_cast<std::size_t>(data.beta->size()));
    for (Eigen::Index i = 0; i < data.beta->size(); ++i) truth[static_cast<std::size_t>(i)] = (*data.beta)[i] != 0.0;
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(data.beta->size());
    for (int i : out.selection.support) scores[i] = 1.0;
    out.support_auc = metric_support_auc(truth, scores);
  }
  if (!out.selection.selection.trace.empty()) {
    out.k_bayes_factor = estimate_k_bayes_factor(out.selection.selection.trace, opt.bf_threshold);
  }
  return out;
}

struct SnrPoint {
  double snr = 0.0;
  std::vector<double> auc;
  std::vector<double> r2_test;
  double mean_auc() const { return mean(auc); }
  double mean_r2() const { return mean(r2_test); }
  static double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  }
};

// Repetition j uses the same design, coefficients and noise draws at every
// SNR; only the noise scale changes along the sweep.
inline std::vector<SnrPoint> snr_sweep(SyntheticSpec base, const std::vector<double>& snrs,
                                       int reps, int budget, double prior_variance,
                                       const PartialEnumOptions& solver) {
  std::vector<SnrPoint> out;
  const std::uint64_t root = base.seed;
  for (double snr : snrs) {
    SnrPoint point;
    point.snr = snr;
    for (int j = 0; j < reps; ++j) {
      base.snr = snr;
      base.seed = derive_seed(root, static_cast<std::uint64_t>(Stream::kInstance),
                              static_cast<std::uint64_t>(j));
      const auto synth = gen_synthetic_regression(base);
      RegressionData data{synth.Z, synth.y, synth.beta, synth.split, synth.groups};
      RegressionProtocolOptions opt;
      opt.budget = budget;
      opt.sigma2 = synth.sigma2;
      opt.prior_variance = prior_variance;
      opt.solver = solver;
      const auto report = run_regression_protocol(data, opt);
      point.auc.push_back(*report.support_auc);
      point.r2_test.push_back(*report.r2_test);
    }
    out.push_back(std::move(point));
  }
  return out;
}

struct RatioInstance {
  double uniform = 1.0;
  double partition = 1.0;
  double knapsack = 1.0;
};

inline double ratio_to(double value, double opt) { return opt > 0 ? value / opt : 1.0; }

// Greedy value over the brute-force optimum on random Wishart-type densities
// of dimension d (even, >= 2): uniform matroid with k = budget, partition
// matroid over the two halves with `caps`, knapsack over pairs with budget
// 2 * budget and partial enumeration.
inline std::vector<RatioInstance> ratio_bench(int d, int instances, std::uint64_t seed, int budget,
                                              std::vector<int> caps,
                                              const PartialEnumOptions& solver) {
  if (d < 2 || d % 2 != 0) fail(ErrorKind::kInvalidArgument, "ratio bench: d must be even and >= 2");
  if (caps.empty()) caps = {(budget + 1) / 2, budget / 2};
  if (caps.size() != 2) fail(ErrorKind::kInvalidArgument, "ratio bench: expects two caps");
  std::vector<int> first, second;
  for (int i = 0; i < d; ++i) (i < d / 2 ? first : second).push_back(i);
  const SupportConstraint uniform(UniformMatroid(d, budget));
  const SupportConstraint partition(PartitionMatroid(d, {first, second}, caps));
  const auto pairs = GroupStructure::uniform_blocks(d, 2);
  const SupportConstraint knapsack(GroupKnapsack(pairs, 2 * budget));

  std::vector<RatioInstance> out;
  for (int i = 0; i < instances; ++i) {
    auto rng = make_stream(seed, Stream::kInstance, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a(d, d);
    for (int c = 0; c < d; ++c)
      for (int r = 0; r < d; ++r) a(r, c) = normal(rng);
    Eigen::MatrixXd precision = a * a.transpose() / d;
    precision.diagonal().array() += 0.1;
    Eigen::VectorXd potential(d);
    for (int r = 0; r < d; ++r) potential[r] = normal(rng);
    const GaussianDensity p(precision, potential);
    const GaussianObjective f(p);
    const GroupGaussianObjective fg(p, pairs);

    RatioInstance inst;
    inst.uniform = ratio_to(greedy_matroid(f, uniform, solver.greedy).objective_value,
                            brute_force_max(f, uniform).objective_value);
    inst.partition = ratio_to(greedy_matroid(f, partition, solver.greedy).objective_value,
                              brute_force_max(f, partition).objective_value);
    inst.knapsack = ratio_to(greedy_partial_enum(fg, pairs, 2 * budget, solver).objective_value,
                             brute_force_max(fg, knapsack).objective_value);
    out.push_back(inst);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tasks

inline Artifacts task_project(const ExperimentConfig& c) {
  if (c.precision.empty() || c.potential.empty()) {
    fail(ErrorKind::kSchema, "project: --precision and --potential are required");
  }
  Artifacts a;
  PhaseTimer timer(a.timings);
  const GaussianDensity p(io::read_matrix(c.precision), io::read_vector(c.potential), 0.0,
                          "input density");
  const int d = p.dim();
  timer.mark("load");
  const PartialEnumOptions opt = solver_options(c);
  SelectionResult sel;
  SupportSet support;
  if (c.constraint == "knapsack") {
    if (!c.budget) fail(ErrorKind::kSchema, "project: knapsack needs --budget");
    const auto groups = resolve_groups(c.groups, d);
    sel = greedy_partial_enum(GroupGaussianObjective(p, groups), groups, *c.budget, opt);
    support = expand_groups(groups, sel.selected);
    a.result["selected_groups"] = sel.selected;
  } else if (c.constraint == "partition") {
    if (c.groups.is_null()) fail(ErrorKind::kSchema, "project: partition needs --groups as views");
    const auto views = resolve_groups(c.groups, d);
    std::vector<std::vector<int>> blocks;
    for (int v = 0; v < views.num_groups(); ++v) blocks.push_back(views.group(v).indices());
    if (c.caps.size() != blocks.size()) {
      fail(ErrorKind::kSchema, "project: need one cap per view");
    }
    sel = greedy_matroid(GaussianObjective(p), SupportConstraint(PartitionMatroid(d, blocks, c.caps)),
                         opt.greedy);
    support = SupportSet(sel.selected);
  } else {
    if (!c.budget) fail(ErrorKind::kSchema, "project: uniform needs --budget");
    sel = greedy_matroid(GaussianObjective(p), SupportConstraint(UniformMatroid(d, *c.budget)),
                         opt.greedy);
    support = SupportSet(sel.selected);
  }
  timer.mark("solve");
  const auto q = project_onto(p, support);
  a.result["support"] = support.indices();
  a.result["objective"] = sel.objective_value;
  a.result["kl"] = kl_projected(q, p);
  a.result["mean"] = to_json(q.mean);
  a.result["trace"] = trace_json(sel);
  a.metrics["objective"] = sel.objective_value;
  a.metrics["kl"] = kl_projected(q, p);
  a.metrics["evaluations"] = sel.evaluations;
  a.curves = trace_table(sel);
  a.support.header = {"index", "mean"};
  for (int i : support) a.support.rows.push_back({static_cast<double>(i), q.mean[i]});
  return a;
}

inline Artifacts task_regress(const ExperimentConfig& c) {
  if (c.input.empty()) fail(ErrorKind::kSchema, "regress: --input DIR is required");
  Artifacts a;
  PhaseTimer timer(a.timings);
  const fs::path dir(c.input);
  const auto z_path = find_matrix(dir, "Z");
  const auto y_path = find_matrix(dir, "y");
  if (!z_path || !y_path) fail(ErrorKind::kIo, "regress: " + dir.string() + " lacks Z and y");
  RegressionData data;
  data.Z = io::read_matrix(*z_path);
  data.y = io::read_vector(*y_path);
  if (auto b = find_matrix(dir, "beta")) data.beta = io::read_vector(*b);
  if (auto s = find_matrix(dir, "split")) {
    const Eigen::VectorXd v = io::read_vector(*s);
    for (double x : v) data.split.push_back(static_cast<int>(x));
  }
  Json meta = Json::object();
  if (fs::exists(dir / "meta.json")) meta = read_json_file(dir / "meta.json");
  const int d = static_cast<int>(data.Z.cols());
  if (!c.groups.is_null()) {
    data.groups = resolve_groups(c.groups, d);
  } else if (fs::exists(dir / "groups.json")) {
    data.groups = groups_from_json(read_json_file(dir / "groups.json"), d, "groups.json");
  } else {
    data.groups = GroupStructure::singletons(d);
  }
  timer.mark("load");

  RegressionProtocolOptions opt;
  if (c.budget) {
    opt.budget = *c.budget;
  } else if (meta.contains("true_k")) {
    opt.budget = meta["true_k"].get<int>();
  } else {
    fail(ErrorKind::kSchema, "regress: --budget is required when meta.json has no true_k");
  }
  std::string sigma2_source = "config";
  if (c.sigma2) {
    opt.sigma2 = *c.sigma2;
  } else if (meta.contains("sigma2")) {
    opt.sigma2 = meta["sigma2"].get<double>();
    sigma2_source = "meta.json";
  } else {
    // Null-model variance of the training response.
    std::vector<int> train = data.split.empty() ? std::vector<int>{} : rows_in(data.split, Split::kTrain);
    const Eigen::VectorXd y = train.empty() ? data.y : Eigen::VectorXd(data.y(train));
    opt.sigma2 = std::max((y.array() - y.mean()).square().mean(), kMinNoiseVariance);
    sigma2_source = "response variance";
  }
  opt.prior_variance = c.prior_variance;
  opt.solver = solver_options(c);
  opt.bf_threshold = c.bf_threshold;
  const auto report = run_regression_protocol(data, opt);
  timer.mark("solve");

  const auto& sel = report.selection;
  a.result["selected_groups"] = sel.selection.selected;
  a.result["support"] = sel.support.indices();
  a.result["objective"] = sel.selection.objective_value;
  a.result["sigma2"] = opt.sigma2;
  a.result["sigma2_source"] = sigma2_source;
  a.result["budget"] = opt.budget;
  a.result["coefficients"] = to_json(sel.projected.mean);
  a.result["trace"] = trace_json(sel.selection);
  a.metrics["r2_train"] = report.r2_train;
  a.metrics["r2_test"] = report.r2_test ? Json(*report.r2_test) : Json(nullptr);
  a.metrics["support_auc"] = report.support_auc ? Json(*report.support_auc) : Json(nullptr);
  a.metrics["k_bayes_factor"] = report.k_bayes_factor ? Json(*report.k_bayes_factor) : Json(nullptr);
  a.metrics["evaluations"] = sel.selection.evaluations;
  a.curves = trace_table(sel.selection, &data.groups);
  a.support.header = {"index", "coefficient"};
  for (int i : sel.support) a.support.rows.push_back({static_cast<double>(i), sel.projected.mean[i]});
  return a;
}

inline GaussianPrior pca_prior(const ExperimentConfig& c, int d) {
  if (c.edges.empty()) return GaussianPrior::isotropic(d, c.prior_variance);
  const Eigen::MatrixXd e = io::read_matrix(c.edges);
  if (e.cols() != 2) fail(ErrorKind::kSchema, c.edges + ": edge list needs two columns");
  std::vector<Edge> edges;
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    edges.emplace_back(static_cast<int>(e(r, 0)), static_cast<int>(e(r, 1)));
  }
  return GaussianPrior::from_precision(build_spatial_precision(d, edges, c.spatial_jitter),
                                       "spatial prior");
}

inline Artifacts task_pca(const ExperimentConfig& c) {
  if (c.input.empty()) fail(ErrorKind::kSchema, "pca: --input PATH is required");
  Artifacts a;
  PhaseTimer timer(a.timings);
  PpcaModel m;
  m.T = io::read_matrix(c.input);
  if (c.center) m.T = center_columns(std::move(m.T));
  const int d = static_cast<int>(m.T.cols());
  m.prior = pca_prior(c, d);
  m.groups = resolve_groups(c.groups, d);
  m.budget = c.budget.value_or(d);
  timer.mark("load");
  PpcaOptions opt;
  opt.em = {c.max_iters, c.tol};
  opt.solver = solver_options(c);
  const auto fit = ppca_em(m, opt);
  timer.mark("fit");

  a.result["status"] = to_string(fit.status);
  a.result["iterations"] = fit.iterations;
  a.result["selected_groups"] = fit.selection.selected;
  a.result["support"] = fit.support.indices();
  a.result["w"] = to_json(fit.q.mean);
  a.result["x"] = to_json(fit.params.x);
  a.result["sigma2"] = fit.params.sigma2[0];
  a.result["free_energy"] = fit.trace;
  a.metrics["free_energy"] = fit.trace.empty() ? Json(nullptr) : Json(fit.trace.back());
  a.metrics["variance_explained_ratio"] =
      fit.q.mean.norm() > 0 ? Json(metric_variance_explained(m.T, fit.q.mean)) : Json(nullptr);
  a.metrics["degenerate_msteps"] = fit.degenerate_msteps;
  a.curves = free_energy_table(fit.trace);
  a.support.header = {"index", "weight"};
  for (int i : fit.support) a.support.rows.push_back({static_cast<double>(i), fit.q.mean[i]});
  return a;
}

inline Artifacts task_cca(const ExperimentConfig& c) {
  if (c.views.empty()) fail(ErrorKind::kSchema, "cca: --views P1,P2,... is required");
  Artifacts a;
  PhaseTimer timer(a.timings);
  PccaModel m;
  for (const auto& path : c.views) {
    Eigen::MatrixXd t = io::read_matrix(path);
    if (c.center) t = center_columns(std::move(t));
    m.priors.push_back(GaussianPrior::isotropic(static_cast<int>(t.cols()), c.prior_variance));
    m.views.push_back(std::move(t));
  }
  if (c.caps.empty()) {
    for (const auto& t : m.views) m.caps.push_back(static_cast<int>(t.cols()));
  } else {
    m.caps = c.caps;
  }
  m.per_view_noise = c.per_view_noise;
  timer.mark("load");
  PccaOptions opt;
  opt.em = {c.max_iters, c.tol};
  opt.greedy = solver_options(c).greedy;
  const auto fit = pcca_fit(m, opt);
  timer.mark("fit");

  a.result["status"] = to_string(fit.fit.status);
  a.result["iterations"] = fit.fit.iterations;
  Json views = Json::array();
  for (std::size_t v = 0; v < m.views.size(); ++v) {
    views.push_back({{"support", fit.view_support[v]}, {"w", to_json(fit.w[v])}});
  }
  a.result["views"] = views;
  a.result["x"] = to_json(fit.fit.params.x);
  a.result["sigma2"] = to_json(fit.fit.params.sigma2);
  a.result["free_energy"] = fit.fit.trace;
  a.metrics["free_energy"] = fit.fit.trace.empty() ? Json(nullptr) : Json(fit.fit.trace.back());
  a.metrics["cross_variance"] = nullptr;
  if (m.views.size() == 2 && fit.w[0].norm() > 0 && fit.w[1].norm() > 0) {
    a.metrics["cross_variance"] = metric_cross_variance(m.views[0], m.views[1], fit.w[0], fit.w[1]);
  }
  if (c.paper_literal_metric) {
    a.metrics["cross_variance_literal"] = nullptr;
    if (m.views.size() == 2) {
      try {
        a.metrics["cross_variance_literal"] =
            metric_cross_variance_literal(m.views[0], m.views[1], fit.w[0], fit.w[1]);
      } catch (const Error& e) {
        a.metrics["cross_variance_literal_note"] = e.what();
      }
    }
  }
  a.curves = free_energy_table(fit.fit.trace);
  a.support.header = {"view", "index", "weight"};
  for (std::size_t v = 0; v < m.views.size(); ++v)
    for (int i : fit.view_support[v])
      a.support.rows.push_back({static_cast<double>(v), static_cast<double>(i), fit.w[v][i]});
  return a;
}

inline SyntheticSpec synthetic_spec(const ExperimentConfig& c, int default_d, int default_n) {
  SyntheticSpec s;
  s.d = c.d.value_or(default_d);
  s.n = c.n.value_or(default_n);
  s.num_groups = c.num_groups;
  s.group_size = c.group_size;
  s.snr = c.snr;
  s.seed = c.seed;
  return s;
}

inline Artifacts task_synth(const ExperimentConfig& c) {
  Artifacts a;
  PhaseTimer timer(a.timings);
  const auto s = synthetic_spec(c, 1000, 1000);
  const auto data = gen_synthetic_regression(s);
  timer.mark("generate");
  const fs::path dir(c.out);
  const std::string ext = "." + c.format;
  io::write_matrix(dir / ("Z" + ext), data.Z);
  io::write_matrix(dir / ("y" + ext), data.y);
  io::write_matrix(dir / ("beta" + ext), data.beta);
  Eigen::VectorXd split(static_cast<Eigen::Index>(data.split.size()));
  for (std::size_t i = 0; i < data.split.size(); ++i) split[static_cast<Eigen::Index>(i)] = data.split[i];
  io::write_matrix(dir / ("split" + ext), split);
  io::write_text(dir / "groups.json", groups_to_json(data.groups).dump(2) + "\n");
  Json meta;
  meta["d"] = s.d;
  meta["n"] = s.n;
  meta["snr"] = s.snr;
  meta["sigma2"] = data.sigma2;
  meta["planted_groups"] = data.planted;
  meta["true_k"] = s.num_groups * s.group_size;
  meta["seed"] = s.seed;
  io::write_text(dir / "meta.json", meta.dump(2) + "\n");
  timer.mark("write");

  a.result["files"] = {"Z" + ext, "y" + ext, "beta" + ext, "split" + ext, "groups.json", "meta.json"};
  a.result["planted_groups"] = data.planted;
  a.result["sigma2"] = data.sigma2;
  a.metrics["signal_variance"] = data.beta.squaredNorm();
  a.metrics["noise_variance"] = data.sigma2;
  a.metrics["train_rows"] = rows_in(data.split, Split::kTrain).size();
  a.metrics["validation_rows"] = rows_in(data.split, Split::kValidation).size();
  a.metrics["test_rows"] = rows_in(data.split, Split::kTest).size();
  a.curves.header = {"group", "planted", "coefficient_norm"};
  for (int g = 0; g < data.groups.num_groups(); ++g) {
    const auto& idx = data.groups.group(g).indices();
    const bool planted = std::binary_search(data.planted.begin(), data.planted.end(), g);
    a.curves.rows.push_back({static_cast<double>(g), planted ? 1.0 : 0.0, data.beta(idx).norm()});
  }
  a.support.header = {"index", "coefficient"};
  for (Eigen::Index i = 0; i < data.beta.size(); ++i)
    if (data.beta[i] != 0.0) a.support.rows.push_back({static_cast<double>(i), data.beta[i]});
  return a;
}

inline Artifacts task_bench(const ExperimentConfig& c) {
  Artifacts a;
  PhaseTimer timer(a.timings);
  const PartialEnumOptions solver = solver_options(c);
  if (c.bench_mode == "ratios") {
    const int d = c.d.value_or(10);
    const int budget = c.budget.value_or(3);
    const auto rows = ratio_bench(d, c.instances, c.seed, budget, c.caps, solver);
    timer.mark("bench");
    a.curves.header = {"instance", "uniform_ratio", "partition_ratio", "knapsack_ratio"};
    double min_u = 1, min_p = 1, min_k = 1;
    int below_u = 0, below_p = 0, below_k = 0;
    const double e_bound = 1.0 - 1.0 / M_E - 1e-9;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      a.curves.rows.push_back({static_cast<double>(i), rows[i].uniform, rows[i].partition, rows[i].knapsack});
      min_u = std::min(min_u, rows[i].uniform);
      min_p = std::min(min_p, rows[i].partition);
      min_k = std::min(min_k, rows[i].knapsack);
      below_u += rows[i].uniform < e_bound;
      below_p += rows[i].partition < 0.5 - 1e-9;
      below_k += rows[i].knapsack < e_bound;
    }
    a.result["mode"] = "ratios";
    a.result["d"] = d;
    a.result["instances"] = c.instances;
    a.metrics["min_uniform_ratio"] = min_u;
    a.metrics["min_partition_ratio"] = min_p;
    a.metrics["min_knapsack_ratio"] = min_k;
    a.metrics["uniform_below_bound"] = below_u;
    a.metrics["partition_below_bound"] = below_p;
    a.metrics["knapsack_below_bound"] = below_k;
    return a;
  }
  const auto spec = synthetic_spec(c, 100, 200);
  std::vector<double> snrs = c.snr_list;
  std::sort(snrs.begin(), snrs.end());
  snrs.erase(std::unique(snrs.begin(), snrs.end()), snrs.end());
  const int budget = c.budget.value_or(spec.num_groups * spec.group_size);
  const auto points = snr_sweep(spec, snrs, c.seeds, budget, c.prior_variance, solver);
  timer.mark("bench");
  a.curves.header = {"snr", "mean_auc", "mean_r2_test", "min_auc", "max_auc"};
  Json per_snr = Json::array();
  for (const auto& p : points) {
    const auto [lo, hi] = std::minmax_element(p.auc.begin(), p.auc.end());
    a.curves.rows.push_back({p.snr, p.mean_auc(), p.mean_r2(), *lo, *hi});
    per_snr.push_back({{"snr", p.snr}, {"auc", p.auc}, {"r2_test", p.r2_test}});
  }
  a.result["mode"] = "snr";
  a.result["d"] = spec.d;
  a.result["n"] = spec.n;
  a.result["budget"] = budget;
  a.result["points"] = per_snr;
  Json mean_auc = Json::array(), mean_r2 = Json::array();
  for (const auto& p : points) {
    mean_auc.push_back(p.mean_auc());
    mean_r2.push_back(p.mean_r2());
  }
  a.metrics["snr"] = snrs;
  a.metrics["mean_support_auc"] = mean_auc;
  a.metrics["mean_r2_test"] = mean_r2;
  return a;
}

inline Artifacts run_task(const ExperimentConfig& c) {
  if (c.task == "project") return task_project(c);
  if (c.task == "regress") return task_regress(c);
  if (c.task == "pca") return task_pca(c);
  if (c.task == "cca") return task_cca(c);
  if (c.task == "synth") return task_synth(c);
  if (c.task == "bench") return task_bench(c);
  fail(ErrorKind::kSchema, "unknown task '" + c.task + "'");
}

inline std::string format_table(const Table& t) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t k = 0; k < t.header.size(); ++k)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = t.rows[r][k];
  return io::format_csv_matrix(m, t.header);
}

inline void write_artifacts(const ExperimentConfig& c, const Artifacts& a) {
  const fs::path dir(c.out);
  Json doc;
  doc["task"] = c.task;
  doc["seed"] = c.seed;
  doc["config"] = config_echo(c);
  doc["result"] = a.result;
  doc["metrics"] = a.metrics;
  Json timings = a.timings;
  timings["threads"] = c.threads;
  doc["timings"] = timings;
  io::write_text(dir / "result.json", doc.dump(2) + "\n");
  io::write_text(dir / "curves.csv", format_table(a.curves));
  if (!a.support.empty()) io::write_text(dir / "support.csv", format_table(a.support));
}

// Runs the configured task and writes its artifacts. Errors are reported on
// `err` as one JSON object and mapped to an exit code.
inline int run_cli(const ExperimentConfig& c, std::ostream& err) {
  try {
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) fail(ErrorKind::kIo, "cannot create output directory " + c.out + ": " + ec.message());
    write_artifacts(c, run_task(c));
    return kExitOk;
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    err << error_json(code, to_string(e.kind()), e.what()) << "\n";
    return code;
  } catch (const std::exception& e) {
    err << error_json(kExitInternal, "internal", e.what()) << "\n";
    return kExitInternal;
  }
}

}  // namespace infoproj
