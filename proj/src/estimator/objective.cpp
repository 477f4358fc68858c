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

#include <cmath>
#include <string>

#include "capnmpc/errors.hpp"
#include "capnmpc/estimator.hpp"

namespace capnmpc {
namespace {

void check_lengths(
  std::span<const Eigen::VectorXd> states, std::span<const Eigen::VectorXd> controls,
  const ReferenceTrajectory & refs)
{
  if (states.empty() || states.size() != controls.size() || states.size() != refs.size()) {
    throw InvalidTrajectoryError("trajectory: states, controls and references must have equal non-zero length");
  }
}

double weighted_tracking(const Eigen::VectorXd & x, const Reference & ref, const SolverConfig & cfg)
{
  const Eigen::ArrayXd precision = cfg.tracking_precision.array() * ref.mask.array();
  return (precision * (x - ref.state).array().square()).sum();
}

}  // namespace

double trajectory_logposterior(
  const DynamicsModel & model, std::span<const Eigen::VectorXd> states,
  std::span<const Eigen::VectorXd> controls, const ReferenceTrajectory & refs,
  const ConstraintEvaluator & constraints, const SolverConfig & cfg)
{
  check_lengths(states, controls, refs);
  const std::size_t nx = model.state_dim();
  Eigen::VectorXd predicted(static_cast<Eigen::Index>(nx));
  for (std::size_t t = 0; t + 1 < states.size(); ++t) {
    model.step(
      std::span<const double>(states[t].data(), nx),
      std::span<const double>(controls[t].data(), model.control_dim()), cfg.dt,
      std::span<double>(predicted.data(), nx));
    const double scale = std::max(1.0, states[t + 1].cwiseAbs().maxCoeff());
    if ((predicted - states[t + 1]).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw InvalidTrajectoryError(
        "trajectory: state " + std::to_string(t + 1) + " does not follow the dynamics model");
    }
  }

  std::vector<double> g(constraints.size());
  double total = 0.0;
  for (std::size_t t = 0; t < states.size(); ++t) {
    const Eigen::VectorXd & u = controls[t];
    total -= 0.5 * u.dot(cfg.control_precision * u);
    total -= 0.5 * weighted_tracking(states[t], refs[t], cfg);
    constraints.evaluate(
      std::span<const double>(states[t].data(), nx),
      std::span<const double>(u.data(), static_cast<std::size_t>(u.size())), t, g);
    double barrier = 0.0;
    for (double gj : g) {
      const double phi = softplus_barrier(gj, cfg.alpha, cfg.beta);
      barrier += phi * phi;
    }
    total -= barrier / (2.0 * cfg.eta_std * cfg.eta_std);
  }
  return total;
}

double tracking_cost(
  std::span<const Eigen::VectorXd> states, std::span<const Eigen::VectorXd> controls,
  const ReferenceTrajectory & refs, const SolverConfig & cfg)
{
  check_lengths(states, controls, refs);
  double cost = 0.0;
  for (std::size_t t = 0; t < states.size(); ++t) {
    cost += controls[t].dot(cfg.control_precision * controls[t]);
    cost += weighted_tracking(states[t], refs[t], cfg);
  }
  return cost;
}

}  // namespace capnmpc
