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

#ifndef CAPNMPC__MLP_HPP_
#define CAPNMPC__MLP_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "capnmpc/dynamics.hpp"

namespace capnmpc {

inline constexpr double kStdFloor = 1e-6;

enum class Activation { relu };

struct MlpLayer {
  std::size_t rows = 0;  // output width
  std::size_t cols = 0;  // input width
  std::vector<double> weights;  // row-major, rows * cols
  std::vector<double> bias;     // rows
};

struct Normalization {
  std::vector<double> mean;
  std::vector<double> std;
};

/// Feedforward increment network. Hidden layers use ReLU, the last layer is
/// linear. Inputs are (state, control) normalized by `input_norm`; outputs are
/// normalized increments, denormalized by `output_norm`.
struct MlpModel {
  std::size_t state_dim = kVehicleStateDim;
  std::size_t control_dim = kVehicleControlDim;
  double dt = 0.2;
  Activation activation = Activation::relu;
  Normalization input_norm;
  Normalization output_norm;
  std::vector<MlpLayer> layers;

  /// Throws LoadError(invariant) naming the first violated field.
  void validate() const;
};

/// Raw network pass on an already-normalized input. Throws ShapeError.
std::vector<double> mlp_forward(const MlpModel & model, std::span<const double> input);

/// next = x + dt * denorm(forward(norm(x, u))), over flat vectors.
void nn_step(
  const MlpModel & model, std::span<const double> x, std::span<const double> u, double dt,
  std::span<double> next);

VehicleState nn_step(const MlpModel & model, const VehicleState & s, const ControlInput & u, double dt);

/// Weights-file codec. JSON numbers are written with round-trip precision.
MlpModel model_from_json(const nlohmann::json & doc);
nlohmann::json model_to_json(const MlpModel & model);

MlpModel load_model(const std::filesystem::path & path);
void save_model(const MlpModel & model, const std::filesystem::path & path);

}  // namespace capnmpc

#endif  // CAPNMPC__MLP_HPP_
