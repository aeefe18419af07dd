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

// Projects a 6-dimensional Gaussian onto its best 2-coordinate support and
// prints the greedy path.

#include <cstdio>

#include <Eigen/Dense>

#include "infoproj/constraints.hpp"
#include "infoproj/gaussian.hpp"
#include "infoproj/objective.hpp"
#include "infoproj/solvers.hpp"

int main() {
  using namespace infoproj;
  Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(6, 6) * 2.0;
  for (int i = 0; i + 1 < 6; ++i) precision(i, i + 1) = precision(i + 1, i) = -0.6;
  Eigen::VectorXd potential(6);
  potential << 3.0, -0.2, 0.1, 2.5, -4.0, 0.3;

  const GaussianDensity p(precision, potential);
  const GaussianObjective f(p);
  const auto r = greedy_matroid(f, SupportConstraint(UniformMatroid(6, 2)));

  for (const auto& step : r.trace)
    std::printf("add %d  gain %.4f  value %.4f\n", step.element, step.gain, step.value);

  const auto q = project_onto(p, SupportSet(r.selected));
  std::printf("projected mean:");
  for (double m : q.mean) std::printf(" %.4f", m);
  std::printf("\nKL(q || p) = %.4f\n", kl_projected(q, p));
}
