// Copyright 2026 The capnmpc Authors
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

#include "capnmpc/lq_oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "capnmpc/estimator.hpp"

namespace capnmpc {

LqPosterior lq_posterior(const LqProblem & problem)
{
  // x_t = x_k + sum_{s<t} u_s, so the measurement at t is linear in u with
  // row a_t = [1 .. 1 (t ones), 0 ..]. Posterior precision q I + r sum a a',
  // information vector r sum a (ref - x_k).
  const auto n = static_cast<Eigen::Index>(problem.horizon + 1);
  Eigen::MatrixXd precision = problem.control_precision * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd information = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a.head(t).setOnes();
    precision += problem.tracking_precision * a * a.transpose();
    information += problem.tracking_precision * (problem.reference - problem.initial_state) * a;
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(precision);
  const Eigen::VectorXd mean = ldlt.solve(information);
  const Eigen::MatrixXd covariance = ldlt.solve(Eigen::MatrixXd::Identity(n, n));

  LqPosterior out;
  out.mean.assign(mean.data(), mean.data() + n);
  out.variance.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.variance[static_cast<std::size_t>(i)] = covariance(i, i);
  }
  return out;
}

LqCheck run_lq_check(
  const LqProblem & problem, std::size_t particles, std::uint64_t seed, double resample_threshold)
{
  SolverConfig cfg;
  cfg.horizon = problem.horizon;
  cfg.particles = particles;
  cfg.control_precision = Eigen::MatrixXd::Constant(1, 1, problem.control_precision);
  cfg.tracking_precision = Eigen::VectorXd::Constant(1, problem.tracking_precision);
  cfg.resample_threshold = resample_threshold;
  cfg.seed = seed;

  const ScalarIntegrator model;
  const NoConstraints constraints;
  const auto refs = ReferenceTrajectory::constant(
    Eigen::VectorXd::Constant(1, problem.reference), Eigen::VectorXd::Ones(1), problem.horizon);

  CapNmpc controller(cfg);
  const double x0 = problem.initial_state;
  const NmpcSolution solution =
    controller.solve(model, constraints, refs, std::span<const double>(&x0, 1));

  LqCheck check;
  check.estimate = solution.control[0];
  check.oracle = lq_posterior(problem).mean.front();
  check.error = std::abs(check.estimate - check.oracle);
  check.min_ess = solution.min_ess;
  return check;
}

}  // namespace capnmpc
