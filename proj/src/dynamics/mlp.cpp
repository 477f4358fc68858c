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

#include <string>
#include <utility>

#include "capnmpc/errors.hpp"
#include "capnmpc/kernels.hpp"
#include "capnmpc/mlp.hpp"

namespace capnmpc {

std::vector<double> mlp_forward(const MlpModel & model, std::span<const double> input)
{
  if (model.layers.empty()) {
    throw ShapeError("mlp_forward: model has no layers");
  }
  if (input.size() != model.layers.front().cols) {
    throw ShapeError(
      "mlp_forward: input length " + std::to_string(input.size()) + " != first layer cols " +
      std::to_string(model.layers.front().cols));
  }
  const auto & kernels = kernels::active_kernels();
  std::vector<double> current(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const MlpLayer & layer = model.layers[l];
    if (layer.cols != current.size() || layer.weights.size() != layer.rows * layer.cols ||
        layer.bias.size() != layer.rows) {
      throw ShapeError("mlp_forward: layer " + std::to_string(l) + " shape mismatch");
    }
    next.resize(layer.rows);
    const bool hidden = l + 1 < model.layers.size();
    kernels.dense(layer.weights, layer.bias, current, next, hidden);
    std::swap(current, next);
  }
  return current;
}

void nn_step(
  const MlpModel & model, std::span<const double> x, std::span<const double> u, double dt,
  std::span<double> next)
{
  if (x.size() != model.state_dim || u.size() != model.control_dim || next.size() != model.state_dim) {
    throw ShapeError("nn_step: state/control length does not match the model");
  }
  if (!(dt > 0.0)) {
    throw InvalidInputError("nn_step: dt must be positive");
  }
  if (model.input_norm.mean.size() != model.state_dim + model.control_dim ||
      model.input_norm.std.size() != model.state_dim + model.control_dim ||
      model.output_norm.mean.size() != model.state_dim ||
      model.output_norm.std.size() != model.state_dim) {
    throw ShapeError("nn_step: normalization statistics do not match the model dimensions");
  }
  std::vector<double> input(model.state_dim + model.control_dim);
  for (std::size_t i = 0; i < model.state_dim; ++i) {
    input[i] = (x[i] - model.input_norm.mean[i]) / model.input_norm.std[i];
  }
  for (std::size_t j = 0; j < model.control_dim; ++j) {
    const std::size_t i = model.state_dim + j;
    input[i] = (u[j] - model.input_norm.mean[i]) / model.input_norm.std[i];
  }
  const std::vector<double> out = mlp_forward(model, input);
  if (out.size() != model.state_dim) {
    throw ShapeError("nn_step: network output length does not match state_dim");
  }
  for (std::size_t i = 0; i < model.state_dim; ++i) {
    const double rate = out[i] * model.output_norm.std[i] + model.output_norm.mean[i];
    next[i] = x[i] + dt * rate;
  }
}

VehicleState nn_step(const MlpModel & model, const VehicleState & s, const ControlInput & u, double dt)
{
  const auto x = s.to_array();
  const auto c = u.to_array();
  std::array<double, kVehicleStateDim> out{};
  nn_step(model, x, c, dt, out);
  return VehicleState::from(out);
}

MlpDynamics::MlpDynamics(std::shared_ptr<const MlpModel> model) : model_(std::move(model))
{
  model_->validate();
}

std::size_t MlpDynamics::state_dim() const { return model_->state_dim; }

std::size_t MlpDynamics::control_dim() const { return model_->control_dim; }

void MlpDynamics::step(
  std::span<const double> x, std::span<const double> u, double dt, std::span<double> next) const
{
  nn_step(*model_, x, u, dt, next);
}

}  // namespace capnmpc
