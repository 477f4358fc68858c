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

#ifndef CAPNMPC__DYNAMICS_HPP_
#define CAPNMPC__DYNAMICS_HPP_

#include <array>
#include <cstddef>
#include <memory>
#include <span>

namespace capnmpc {

inline constexpr std::size_t kVehicleStateDim = 4;
inline constexpr std::size_t kVehicleControlDim = 2;

/// Planar vehicle state. Heading is kept unwrapped.
struct VehicleState {
  double px = 0.0;   // [m] east
  double py = 0.0;   // [m] north
  double v = 0.0;    // [m/s]
  double psi = 0.0;  // [rad]

  std::array<double, kVehicleStateDim> to_array() const { return {px, py, v, psi}; }
  static VehicleState from(std::span<const double> x) { return {x[0], x[1], x[2], x[3]}; }
  bool operator==(const VehicleState &) const = default;
};

struct ControlInput {
  double a = 0.0;      // [m/s^2]
  double delta = 0.0;  // [rad] steering angle

  std::array<double, kVehicleControlDim> to_array() const { return {a, delta}; }
  static ControlInput from(std::span<const double> u) { return {u[0], u[1]}; }
  bool operator==(const ControlInput &) const = default;
};

inline constexpr double kDefaultWheelbase = 4.0;

/// One explicit-Euler step of the kinematic bicycle, derivatives taken at the
/// old state. Throws InvalidInputError on non-finite input, dt <= 0,
/// wheelbase <= 0 or |delta| >= pi/2.
VehicleState bicycle_step(const VehicleState & s, const ControlInput & u, double dt, double wheelbase);

/// Deterministic discrete-time transition x' = f(x, u; dt) over flat vectors.
/// Implementations are immutable and safe to call concurrently.
class DynamicsModel {
public:
  virtual ~DynamicsModel() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t control_dim() const = 0;

  virtual void step(
    std::span<const double> x, std::span<const double> u, double dt, std::span<double> next) const = 0;
};

/// Kinematic bicycle as a DynamicsModel. Steering is saturated at
/// `steering_limit` (mechanical stop) before the step, so sampled controls in
/// the particle filter never hit the |delta| >= pi/2 domain error.
class BicycleModel final : public DynamicsModel {
public:
  explicit BicycleModel(double wheelbase = kDefaultWheelbase, double steering_limit = 1.0);

  std::size_t state_dim() const override { return kVehicleStateDim; }
  std::size_t control_dim() const override { return kVehicleControlDim; }
  void step(std::span<const double> x, std::span<const double> u, double dt, std::span<double> next)
    const override;

  double wheelbase() const { return wheelbase_; }
  double steering_limit() const { return steering_limit_; }

private:
  double wheelbase_;
  double steering_limit_;
};

struct MlpModel;

/// Learned increment model x' = x + dt * f_hat(x, u).
class MlpDynamics final : public DynamicsModel {
public:
  explicit MlpDynamics(std::shared_ptr<const MlpModel> model);

  std::size_t state_dim() const override;
  std::size_t control_dim() const override;
  void step(std::span<const double> x, std::span<const double> u, double dt, std::span<double> next)
    const override;

  const MlpModel & model() const { return *model_; }

private:
  std::shared_ptr<const MlpModel> model_;
};

/// Scalar integrator x' = x + u, the linear-Gaussian test system.
class ScalarIntegrator final : public DynamicsModel {
public:
  std::size_t state_dim() const override { return 1; }
  std::size_t control_dim() const override { return 1; }
  void step(std::span<const double> x, std::span<const double> u, double, std::span<double> next)
    const override
  {
    next[0] = x[0] + u[0];
  }
};

}  // namespace capnmpc

#endif  // CAPNMPC__DYNAMICS_HPP_
