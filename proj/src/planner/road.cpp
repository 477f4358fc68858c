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

#include "capnmpc/errors.hpp"
#include "capnmpc/planner.hpp"

namespace capnmpc {

double RoadGeometry::centerline_y(double x) const
{
  if (kind == CenterlineKind::straight) {
    return 0.0;
  }
  return amplitude * std::sin(2.0 * std::numbers::pi * x / wavelength);
}

double RoadGeometry::centerline_slope(double x) const
{
  if (kind == CenterlineKind::straight) {
    return 0.0;
  }
  const double k = 2.0 * std::numbers::pi / wavelength;
  return amplitude * k * std::cos(k * x);
}

double RoadGeometry::centerline_heading(double x) const
{
  return std::atan(centerline_slope(x));
}

double lateral_offset(const VehicleState & s, const RoadGeometry & road)
{
  return s.py - road.centerline_y(s.px);
}

double road_constraint(const VehicleState & s, const RoadGeometry & road, double vehicle_half_width)
{
  return std::abs(lateral_offset(s, road)) - (road.width / 2.0 - vehicle_half_width);
}

double obstacle_constraint(const VehicleState & s, const Point2 & obstacle, double safety_radius)
{
  return safety_radius - std::hypot(s.px - obstacle.x, s.py - obstacle.y);
}

std::array<double, 4> control_bound_constraints(const ControlInput & u, const ControlBounds & bounds)
{
  return {
    bounds.lower.a - u.a,
    bounds.lower.delta - u.delta,
    u.a - bounds.upper.a,
    u.delta - bounds.upper.delta,
  };
}

ControlInput clamp_to_bounds(const ControlInput & u, const ControlBounds & bounds)
{
  return {
    std::clamp(u.a, bounds.lower.a, bounds.upper.a),
    std::clamp(u.delta, bounds.lower.delta, bounds.upper.delta),
  };
}

void Scenario::validate() const
{
  if (!(road.width > 0.0)) {
    throw ConfigError("scenario.road.width", "must be positive");
  }
  if (!(road.width > 2.0 * vehicle_half_width)) {
    throw ConfigError("scenario.road.width", "must exceed the vehicle width");
  }
  if (road.kind == CenterlineKind::sine && !(road.wavelength > 0.0)) {
    throw ConfigError("scenario.road.wavelength", "must be positive");
  }
  if (!(vehicle_half_width > 0.0)) {
    throw ConfigError("scenario.vehicle_half_width", "must be positive");
  }
  if (!(safety_radius > 0.0)) {
    throw ConfigError("scenario.safety_radius", "must be positive");
  }
  if (!(planning_margin >= 0.0)) {
    throw ConfigError("scenario.planning_margin", "must be non-negative");
  }
  if (!(dt > 0.0)) {
    throw ConfigError("scenario.dt", "must be positive");
  }
  if (!(wheelbase > 0.0)) {
    throw ConfigError("scenario.wheelbase", "must be positive");
  }
  if (!(goal_tolerance > 0.0)) {
    throw ConfigError("scenario.goal_tolerance", "must be positive");
  }
  if (episode_length == 0) {
    throw ConfigError("scenario.episode_length", "must be positive");
  }
  if (!(bounds.lower.a < bounds.upper.a)) {
    throw ConfigError("scenario.control_bounds.a", "lower must be below upper");
  }
  if (!(bounds.lower.delta < bounds.upper.delta)) {
    throw ConfigError("scenario.control_bounds.delta", "lower must be below upper");
  }
  if (road_constraint(ego_init, road, vehicle_half_width) > 0.0) {
    throw ConfigError("scenario.ego_init", "initial state must lie inside the road");
  }
  if (road_constraint(VehicleState{goal.x, goal.y, 0.0, 0.0}, road, vehicle_half_width) > 0.0) {
    throw ConfigError("scenario.goal", "goal must lie inside the road");
  }
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (obstacles[i].kind == ObstacleKind::moving && !(obstacles[i].trigger_distance > 0.0)) {
      throw ConfigError(
        "scenario.obstacles[" + std::to_string(i) + "].trigger_distance", "must be positive");
    }
  }
}

}  // namespace capnmpc
