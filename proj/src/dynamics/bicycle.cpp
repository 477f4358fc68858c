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
#include <cmath>
#include <numbers>
#include <string>

#include "capnmpc/dynamics.hpp"
#include "capnmpc/errors.hpp"

namespace capnmpc {

VehicleState bicycle_step(const VehicleState & s, const ControlInput & u, double dt, double wheelbase)
{
  const bool finite = std::isfinite(s.px) && std::isfinite(s.py) && std::isfinite(s.v) &&
                      std::isfinite(s.psi) && std::isfinite(u.a) && std::isfinite(u.delta) &&
                      std::isfinite(dt) && std::isfinite(wheelbase);
  if (!finite) {
    throw InvalidInputError("bicycle_step: non-finite input");
  }
  if (dt <= 0.0) {
    throw InvalidInputError("bicycle_step: dt must be positive");
  }
  if (wheelbase <= 0.0) {
    throw InvalidInputError("bicycle_step: wheelbase must be positive");
  }
  if (std::abs(u.delta) >= std::numbers::pi / 2.0) {
    throw InvalidInputError("bicycle_step: |delta| must be below pi/2, got " + std::to_string(u.delta));
  }

  VehicleState next;
  next.px = s.px + dt * s.v * std::cos(s.psi);
  next.py = s.py + dt * s.v * std::sin(s.psi);
  next.v = s.v + dt * u.a;
  next.psi = s.psi + dt * (s.v / wheelbase) * std::tan(u.delta);
  return next;
}

BicycleModel::BicycleModel(double wheelbase, double steering_limit)
: wheelbase_(wheelbase), steering_limit_(steering_limit)
{
  if (!(wheelbase > 0.0)) {
    throw InvalidInputError("BicycleModel: wheelbase must be positive");
  }
  if (!(steering_limit > 0.0 && steering_limit < std::numbers::pi / 2.0)) {
    throw InvalidInputError("BicycleModel: steering limit must lie in (0, pi/2)");
  }
}

void BicycleModel::step(
  std::span<const double> x, std::span<const double> u, double dt, std::span<double> next) const
{
  ControlInput control = ControlInput::from(u);
  if (std::isfinite(control.delta)) {
    control.delta = std::clamp(control.delta, -steering_limit_, steering_limit_);
  }
  const VehicleState out = bicycle_step(VehicleState::from(x), control, dt, wheelbase_);
  next[0] = out.px;
  next[1] = out.py;
  next[2] = out.v;
  next[3] = out.psi;
}

}  // namespace capnmpc
