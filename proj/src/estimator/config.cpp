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

#include <Eigen/Cholesky>

#include "capnmpc/errors.hpp"
#include "capnmpc/estimator.hpp"

namespace capnmpc {

void SolverConfig::validate() const
{
  if (horizon < 1) {
    throw ConfigError("H", "horizon must be at least 1");
  }
  if (particles < 1) {
    throw ConfigError("N", "particle count must be at least 1");
  }
  if (control_precision.rows() == 0 || control_precision.rows() != control_precision.cols()) {
    throw ConfigError("Q", "control precision must be a non-empty square matrix");
  }
  if (!control_precision.allFinite() || !control_precision.isApprox(control_precision.transpose())) {
    throw ConfigError("Q", "control precision must be finite and symmetric");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(control_precision).info() != Eigen::Success) {
    throw ConfigError("Q", "control precision must be positive definite");
  }
  if (tracking_precision.size() == 0 || !tracking_precision.allFinite() ||
      (tracking_precision.array() < 0.0).any()) {
    throw ConfigError("R", "tracking precision must be a non-negative finite diagonal");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("alpha", "must be positive");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ConfigError("beta", "must be positive");
  }
  if (!(eta_std > 0.0) || !std::isfinite(eta_std)) {
    throw ConfigError("eta_std", "must be positive");
  }
  if (!(smoother_bandwidth > 0.0) || !std::isfinite(smoother_bandwidth)) {
    throw ConfigError("smoother_bandwidth", "must be positive");
  }
  if (!(resample_threshold >= 0.0 && resample_threshold <= 1.0)) {
    throw ConfigError("resample_threshold", "must lie in [0, 1]");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("dt", "must be positive");
  }
}

void SolverConfig::validate_for(const DynamicsModel & model) const
{
  validate();
  if (static_cast<std::size_t>(control_precision.rows()) != model.control_dim()) {
    throw ConfigError("Q", "dimension must equal the model's control dimension");
  }
  if (static_cast<std::size_t>(tracking_precision.size()) != model.state_dim()) {
    throw ConfigError("R", "dimension must equal the model's state dimension");
  }
}

ReferenceTrajectory ReferenceTrajectory::constant(
  const Eigen::VectorXd & state, const Eigen::VectorXd & mask, std::size_t horizon)
{
  return ReferenceTrajectory(std::vector<Reference>(horizon + 1, Reference{state, mask}));
}

AugmentedParticle ParticleHistory::particle(std::size_t t, std::size_t i) const
{
  const ParticleStep & step = steps.at(t);
  AugmentedParticle p;
  p.state = Eigen::Map<const Eigen::VectorXd>(
    step.states.data() + i * state_dim, static_cast<Eigen::Index>(state_dim));
  p.control = Eigen::Map<const Eigen::VectorXd>(
    step.controls.data() + i * control_dim, static_cast<Eigen::Index>(control_dim));
  p.log_weight = step.log_weights.at(i);
  return p;
}

}  // namespace capnmpc
