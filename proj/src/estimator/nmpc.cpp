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

#include <algorithm>

#include "capnmpc/estimator.hpp"

namespace capnmpc {

NmpcSolution nmpc_step(
  const DynamicsModel & model, const ConstraintEvaluator & constraints,
  const ReferenceTrajectory & refs, std::span<const double> current_state, const SolverConfig & cfg,
  const CounterRng & rng, const FilterOptions & options)
{
  const ParticleHistory history =
    forward_filter(model, constraints, refs, current_state, cfg, rng, options);
  const SmoothedWeights smoothed = backward_smooth(history, cfg);

  NmpcSolution solution;
  solution.estimate = point_estimate(history, 0, smoothed.weights[0]);
  solution.control = solution.estimate.control;
  if (history.steps.size() > 1) {
    solution.next_control_mean = point_estimate(history, 1, smoothed.weights[1]).control;
  } else {
    solution.next_control_mean = Eigen::VectorXd::Zero(solution.control.size());
  }
  solution.min_ess = static_cast<double>(history.particles);
  for (const ParticleStep & step : history.steps) {
    solution.min_ess = std::min(solution.min_ess, step.ess);
    solution.resample_count += step.resampled ? 1 : 0;
  }
  return solution;
}

CapNmpc::CapNmpc(SolverConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed)
{
  cfg_.validate();
}

NmpcSolution CapNmpc::solve(
  const DynamicsModel & model, const ConstraintEvaluator & constraints,
  const ReferenceTrajectory & refs, std::span<const double> current_state)
{
  FilterOptions options;
  options.call = rng_.next_call();
  options.control_mean = warm_start_;
  NmpcSolution solution = nmpc_step(model, constraints, refs, current_state, cfg_, rng_, options);
  warm_start_ = solution.next_control_mean;
  return solution;
}

void CapNmpc::reset()
{
  rng_ = CounterRng(cfg_.seed);
  warm_start_.reset();
}

}  // namespace capnmpc
