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

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "infoproj/harness/config.hpp"
#include "infoproj/harness/matrix_io.hpp"
#include "infoproj/harness/metrics.hpp"
#include "infoproj/harness/rng.hpp"
#include "infoproj/harness/runner.hpp"
#include "infoproj/harness/spatial.hpp"
#include "infoproj/harness/synthetic.hpp"

namespace infoproj {
namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::kInvalidArgument;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("infoproj_harness_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

TEST(R2, Examples) {
  Eigen::VectorXd y(3);
  y << 0, 1, 2;
  EXPECT_DOUBLE_EQ(metric_r2(y, y), 1.0);
  EXPECT_NEAR(metric_r2(y, Eigen::VectorXd::Constant(3, 1.0)), 0.0, 1e-15);
  Eigen::VectorXd p(3);
  p << 0, 1, 1;
  EXPECT_DOUBLE_EQ(metric_r2(y, p), 0.5);
  EXPECT_EQ(kind_of([&] { metric_r2(Eigen::VectorXd::Ones(3), p); }), ErrorKind::kDegenerate);
  EXPECT_EQ(kind_of([&] { metric_r2(y, Eigen::VectorXd::Ones(2)); }),
            ErrorKind::kDimensionMismatch);
}

TEST(Auc, PerfectAndInverted) {
  std::vector<bool> truth{false, true, false, true, false};
  Eigen::VectorXd s(5);
  s << 0.1, 0.9, 0.2, 0.8, 0.3;
  EXPECT_DOUBLE_EQ(metric_support_auc(truth, s), 1.0);
  EXPECT_DOUBLE_EQ(metric_support_auc(truth, -s), 0.0);
}

TEST(Auc, TiesAtMidrank) {
  std::vector<bool> truth{true, false, true, false};
  EXPECT_DOUBLE_EQ(metric_support_auc(truth, Eigen::VectorXd::Zero(4)), 0.5);
  // One positive above every negative, one tied with one negative: (2 + 1.5) / 4.
  Eigen::VectorXd s(4);
  s << 1, 0, 0, -1;
  EXPECT_DOUBLE_EQ(metric_support_auc(truth, s), 0.875);
}

TEST(Auc, RandomScoresAverageHalf) {
  double total = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    std::vector<bool> truth(1000, false);
    for (int i = 0; i < 20; ++i) truth[static_cast<std::size_t>(i * 50)] = true;
    Eigen::VectorXd s(1000);
    for (auto& v : s) v = n(rng);
    total += metric_support_auc(truth, s);
  }
  EXPECT_NEAR(total / 100, 0.5, 0.05);
}

TEST(Auc, RejectsSingleClass) {
  EXPECT_EQ(kind_of([] { metric_support_auc({true, true}, Eigen::VectorXd::Zero(2)); }),
            ErrorKind::kDegenerate);
}

TEST(VarianceExplained, RankOneAndOrthogonal) {
  Eigen::VectorXd a(4), v(3), w(3);
  a << 1, -2, 0.5, 3;
  v << 1, 2, 2;
  w << 2, -1, 0;
  const Eigen::MatrixXd t = a * v.transpose();
  EXPECT_NEAR(metric_variance_explained(t, v), 1.0, 1e-15);
  EXPECT_NEAR(metric_variance_explained(t, 7.0 * v), 1.0, 1e-15);
  EXPECT_NEAR(metric_variance_explained(t, w), 0.0, 1e-15);
}

TEST(VarianceExplained, TopEigenvectorGivesEigenvalueShare) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Eigen::MatrixXd t(30, 6);
  for (auto& x : t.reshaped()) x = n(rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.transpose() * t);
  const double expected = es.eigenvalues()(5) / es.eigenvalues().sum();
  EXPECT_NEAR(metric_variance_explained(t, es.eigenvectors().col(5)), expected, 1e-12);
}

TEST(CrossVariance, IdenticalAndOrthogonal) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  Eigen::MatrixXd x(20, 3);
  for (auto& e : x.reshaped()) e = n(rng);
  Eigen::VectorXd u(3);
  u << 0.3, -1, 2;
  EXPECT_NEAR(metric_cross_variance(x, x, u, u), 1.0, 1e-14);
  EXPECT_NEAR(metric_cross_variance(x, x, u, -2.0 * u), -1.0, 1e-14);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 2), b = Eigen::MatrixXd::Zero(4, 2);
  a(0, 0) = 1;
  a(1, 1) = 1;
  b(2, 0) = 1;
  b(3, 1) = 1;
  EXPECT_DOUBLE_EQ(metric_cross_variance(a, b, Eigen::Vector2d(1, 1), Eigen::Vector2d(1, -1)), 0.0);
}

TEST(CrossVariance, MatchesDirectFormula) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  Eigen::MatrixXd x(15, 4), y(15, 3);
  for (auto& e : x.reshaped()) e = n(rng);
  for (auto& e : y.reshaped()) e = n(rng);
  Eigen::VectorXd u(4), v(3);
  for (auto& e : u) e = n(rng);
  for (auto& e : v) e = n(rng);
  double num = 0, xx = 0, yy = 0;
  for (int r = 0; r < 15; ++r) {
    double a = 0, b = 0;
    for (int c = 0; c < 4; ++c) a += x(r, c) * u(c);
    for (int c = 0; c < 3; ++c) b += y(r, c) * v(c);
    num += a * b;
    xx += a * a;
    yy += b * b;
  }
  EXPECT_NEAR(metric_cross_variance(x, y, u, v), num / std::sqrt(xx * yy), 1e-13);
}

TEST(CrossVariance, LiteralFormNeedsSquareInputs) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(4, 3);
  EXPECT_EQ(kind_of([&] {
              metric_cross_variance_literal(x, x, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3));
            }),
            ErrorKind::kDimensionMismatch);
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::Vector2d u(1, 0);
  EXPECT_DOUBLE_EQ(metric_cross_variance_literal(i, 2.0 * i, u, u), 1.0);
}

TEST(Spatial, EmptyGraphIsJitter) {
  EXPECT_TRUE(build_spatial_precision(3, {}, 0.5).isApprox(0.5 * Eigen::MatrixXd::Identity(3, 3)));
}

TEST(Spatial, PathLaplacian) {
  const double eps = 1e-3;
  Eigen::Matrix3d expected;
  expected << 1 + eps, -1, 0, -1, 2 + eps, -1, 0, -1, 1 + eps;
  EXPECT_EQ(build_spatial_precision(3, {{0, 1}, {2, 1}}, eps), Eigen::MatrixXd(expected));
}

TEST(Spatial, GridRowSumsAreJitter) {
  const auto edges = grid_edges(4, 4);
  EXPECT_EQ(edges.size(), 24u);
  const Eigen::MatrixXd p = build_spatial_precision(16, edges, 0.01);
  for (int r = 0; r < 16; ++r) EXPECT_NEAR(p.row(r).sum(), 0.01, 1e-15);
  EXPECT_EQ(p(5, 5), 4.01);
  EXPECT_EQ(p(0, 0), 2.01);
  EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(p).info(), Eigen::Success);
}

TEST(Spatial, RejectsBadEdges) {
  EXPECT_EQ(kind_of([] { build_spatial_precision(3, {{1, 1}}, 1e-3); }),
            ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([] { build_spatial_precision(3, {{0, 1}, {1, 0}}, 1e-3); }),
            ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([] { build_spatial_precision(3, {{0, 3}}, 1e-3); }),
            ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([] { build_spatial_precision(3, {}, 0.0); }), ErrorKind::kInvalidArgument);
}

std::vector<SelectionStep> steps(std::initializer_list<double> gains) {
  std::vector<SelectionStep> out;
  int i = 0;
  for (double g : gains) out.push_back({i++, g, 0.0});
  return out;
}

TEST(BayesFactor, LastStrongStep) {
  EXPECT_EQ(estimate_k_bayes_factor(steps({5, 4, 0.1}), 2.3), 2);
  EXPECT_EQ(estimate_k_bayes_factor(steps({50, 40, 30})), 3);
  EXPECT_EQ(estimate_k_bayes_factor(steps({1, 0.5})), 0);
  EXPECT_EQ(estimate_k_bayes_factor(steps({5, 0.1, 3})), 3);
  EXPECT_EQ(kind_of([] { estimate_k_bayes_factor(steps({})); }), ErrorKind::kInvalidArgument);
}

TEST(MatrixIo, CsvRoundTripIsExact) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(7, 5);
  for (auto& e : m.reshaped()) e = n(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
  m(0, 0) = std::numeric_limits<double>::denorm_min();
  m(1, 1) = -0.0;
  const auto back = io::parse_csv_matrix(io::format_csv_matrix(m), "m");
  EXPECT_EQ(back, m);
  const auto with_header = io::parse_csv_matrix(io::format_csv_matrix(m, {"a", "b,c", "d", "e", "f"}), "m");
  EXPECT_EQ(with_header, m);
}

TEST(MatrixIo, BinaryRoundTripIsBitIdentical) {
  const auto dir = scratch_dir("bin");
  Eigen::MatrixXd m(3, 2);
  m << 1.0 / 3, -2, std::nextafter(1.0, 2.0), 4e-300, 5, 6e300;
  io::write_matrix(dir / "m.bin", m);
  const auto back = io::read_matrix(dir / "m.bin");
  ASSERT_EQ(back.rows(), 3);
  ASSERT_EQ(back.cols(), 2);
  for (int i = 0; i < 6; ++i)
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.reshaped()(i)),
              std::bit_cast<std::uint64_t>(m.reshaped()(i)));
  const std::string bytes = io::read_text(dir / "m.bin");
  EXPECT_EQ(bytes.size(), 24u + 48u);
  EXPECT_EQ(kind_of([&] { io::parse_binary_matrix(bytes.substr(0, 40), "m"); }),
            ErrorKind::kSchema);
}

TEST(MatrixIo, ParsesQuotedFieldsAndCrlf) {
  const auto m = io::parse_csv_matrix("\"x\",\"y, z\"\r\n1,\"2\"\r\n3,4\r\n", "m");
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 2, 3, 4;
  EXPECT_EQ(m, expected);
}

TEST(MatrixIo, MalformedInputIsSchemaError) {
  EXPECT_EQ(kind_of([] { io::parse_csv_matrix("1,2\n3\n", "m"); }), ErrorKind::kSchema);
  EXPECT_EQ(kind_of([] { io::parse_csv_matrix("1,2\n3,x\n", "m"); }), ErrorKind::kSchema);
  EXPECT_EQ(kind_of([] { io::parse_csv_matrix("a,b\n", "m"); }), ErrorKind::kSchema);
  EXPECT_EQ(kind_of([] { io::parse_csv_matrix("", "m"); }), ErrorKind::kSchema);
  EXPECT_EQ(kind_of([] { io::read_matrix("/nonexistent/infoproj/m.csv"); }), ErrorKind::kIo);
}

TEST(Rng, StreamsAreIndependentAndStable) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_NE(derive_seed(0, 1), derive_seed(1, 1));
  auto a = make_stream(9, Stream::kDesign), b = make_stream(9, Stream::kDesign);
  EXPECT_EQ(a(), b());
  EXPECT_NE(make_stream(9, Stream::kNoise)(), make_stream(9, Stream::kDesign)());
}

TEST(Synthetic, DeterministicAndShaped) {
  SyntheticSpec spec;
  spec.d = 60;
  spec.n = 100;
  spec.num_groups = 3;
  spec.group_size = 4;
  spec.seed = 21;
  const auto a = gen_synthetic_regression(spec);
  const auto b = gen_synthetic_regression(spec);
  EXPECT_EQ(a.Z, b.Z);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.planted, b.planted);
  EXPECT_EQ(a.split, b.split);
  EXPECT_EQ(a.planted.size(), 3u);
  EXPECT_EQ(a.groups.num_groups(), 15);
  int nonzero = 0;
  for (double v : a.beta) nonzero += v != 0.0;
  EXPECT_EQ(nonzero, 12);
  for (int g : a.planted)
    for (int i : a.groups.group(g).indices()) {
      EXPECT_GE(std::abs(a.beta[i]), 0.5);
      EXPECT_LE(std::abs(a.beta[i]), 1.5);
    }
  EXPECT_EQ(rows_in(a.split, Split::kTrain).size(), 50u);
  EXPECT_EQ(rows_in(a.split, Split::kValidation).size(), 10u);
  EXPECT_EQ(rows_in(a.split, Split::kTest).size(), 40u);

  spec.seed = 22;
  EXPECT_NE(gen_synthetic_regression(spec).Z, a.Z);
}

TEST(Synthetic, HighSnrIsNearlyNoiseless) {
  SyntheticSpec spec;
  spec.d = 40;
  spec.n = 50;
  spec.num_groups = 2;
  spec.snr = 1e12;
  const auto s = gen_synthetic_regression(spec);
  const Eigen::VectorXd signal = s.Z * s.beta;
  EXPECT_LT((s.y - signal).norm(), 1e-5 * signal.norm());
  EXPECT_DOUBLE_EQ(s.sigma2, s.beta.squaredNorm() / 1e12);
}

TEST(Synthetic, RejectsOversizedPlant) {
  SyntheticSpec spec;
  spec.d = 10;
  spec.num_groups = 3;
  spec.group_size = 4;
  EXPECT_EQ(kind_of([&] { gen_synthetic_regression(spec); }), ErrorKind::kInvalidArgument);
}

TEST(Config, DefaultsAndStrictKeys) {
  const auto c = parse_config(Json{{"task", "pca"}});
  EXPECT_EQ(c.task, "pca");
  EXPECT_EQ(c.m, 3);
  EXPECT_EQ(c.constraint, "uniform");
  EXPECT_EQ(kind_of([] { parse_config(Json{{"task", "pca"}, {"bogus", 1}}); }), ErrorKind::kSchema);
  EXPECT_EQ(kind_of([] { parse_config(Json{{"task", "fly"}}); }), ErrorKind::kSchema);
  EXPECT_EQ(kind_of([] { parse_config(Json{{"task", "pca"}, {"m", "three"}}); }),
            ErrorKind::kSchema);
  EXPECT_EQ(kind_of([] { parse_config(Json{{"task", "pca"}, {"budget", -1}}); }),
            ErrorKind::kSchema);
}

TEST(Config, EchoOmitsOutputAndThreads) {
  auto a = parse_config(Json{{"task", "synth"}, {"out", "/tmp/a"}, {"threads", 1}});
  auto b = parse_config(Json{{"task", "synth"}, {"out", "/tmp/b"}, {"threads", 4}});
  EXPECT_EQ(config_echo(a).dump(), config_echo(b).dump());
  EXPECT_FALSE(config_echo(a).contains("out"));
}

TEST(Groups, ResolveVariants) {
  EXPECT_EQ(resolve_groups(Json(), 4).num_groups(), 4);
  const auto u = resolve_groups(Json("uniform:3"), 7);
  ASSERT_EQ(u.num_groups(), 3);
  EXPECT_EQ(u.group(2).indices(), std::vector<int>{6});
  const auto inline_groups = resolve_groups(Json::parse("[[0, 2], [1]]"), 3);
  EXPECT_EQ(inline_groups.group(0).indices(), (std::vector<int>{0, 2}));
  const auto with_costs = resolve_groups(Json::parse(R"({"groups": [[0], [1, 2]], "costs": [1, 5]})"), 3);
  EXPECT_EQ(with_costs.group_cost(1), 5);

  const auto dir = scratch_dir("groups");
  io::write_text(dir / "g.csv", "0,1\n2\n");
  EXPECT_EQ(resolve_groups(Json((dir / "g.csv").string()), 3).num_groups(), 2);
  io::write_text(dir / "g.json", "[[1], [0, 2]]");
  EXPECT_EQ(resolve_groups(Json((dir / "g.json").string()), 3).group(1).indices(),
            (std::vector<int>{0, 2}));

  EXPECT_EQ(kind_of([] { resolve_groups(Json("uniform:0"), 3); }), ErrorKind::kSchema);
  EXPECT_EQ(kind_of([] { resolve_groups(Json("uniform:x"), 3); }), ErrorKind::kSchema);
  EXPECT_EQ(kind_of([] { resolve_groups(Json::parse("[[0, 1.5]]"), 3); }), ErrorKind::kSchema);
  EXPECT_EQ(kind_of([] { resolve_groups(Json("/nonexistent/g.csv"), 3); }), ErrorKind::kIo);
}

TEST(ExitCodes, MapKinds) {
  EXPECT_EQ(exit_code_for(ErrorKind::kSchema), kExitUsage);
  EXPECT_EQ(exit_code_for(ErrorKind::kDimensionMismatch), kExitUsage);
  EXPECT_EQ(exit_code_for(ErrorKind::kIo), kExitIo);
  EXPECT_EQ(exit_code_for(ErrorKind::kNotPositiveDefinite), kExitSolver);
  const auto j = Json::parse(error_json(kExitIo, "io", "missing"));
  EXPECT_EQ(j["error"]["message"], "missing");
}

}  // namespace
}  // namespace infoproj
