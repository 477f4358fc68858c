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

#include "capnmpc/planner.hpp"

namespace capnmpc {

PlanningConstraints::PlanningConstraints(const Scenario & scenario, std::vector<Point2> obstacles)
: road_(scenario.road),
  bounds_(scenario.bounds),
  half_width_(scenario.vehicle_half_width),
  safety_radius_(scenario.safety_radius + scenario.planning_margin),
  obstacles_(std::move(obstacles))
{}

void PlanningConstraints::evaluate(
  std::span<const double> x, std::span<const double> u, std::size_t, std::span<double> g) const
{
  const VehicleState s = VehicleState::from(x);
  std::size_t j = 0;
  g[j++] = road_constraint(s, road_, half_width_);
  for (const Point2 & o : obstacles_) {
    g[j++] = obstacle_constraint(s, o, safety_radius_);
  }
  for (double c : control_bound_constraints(ControlInput::from(u), bounds_)) {
    g[j++] = c;
  }
}

PlanningConstraints assemble_constraints(const Scenario & scenario, std::vector<Point2> obstacles)
{
  return PlanningConstraints(scenario, std::move(obstacles));
}

PlanningConstraints assemble_constraints(const Scenario & scenario)
{
  return PlanningConstraints(scenario, obstacle_positions(initial_obstacle_states(scenario)));
}

ReferenceTrajectory goal_reference(const Scenario & scenario, std::size_t horizon)
{
  Eigen::VectorXd state(4);
  state << scenario.goal.x, scenario.goal.y, scenario.reference_speed, 0.0;
  Eigen::VectorXd mask(4);
  mask << 1.0, 1.0, 1.0, 0.0;
  return ReferenceTrajectory::constant(state, mask, horizon);
}

ReferenceTrajectory road_reference(
  const Scenario & scenario, const VehicleState & ego, std::size_t horizon)
{
  const double goal_offset = scenario.goal.y - scenario.road.centerline_y(scenario.goal.x);
  Eigen::VectorXd mask(4);
  mask << 1.0, 1.0, 1.0, 0.0;
  std::vector<Reference> points;
  points.reserve(horizon + 1);
  for (std::size_t t = 0; t <= horizon; ++t) {
    const double ahead = ego.px + scenario.reference_speed * scenario.dt * static_cast<double>(t);
    const double x = std::min(ahead, scenario.goal.x);
    Eigen::VectorXd state(4);
    state << x, scenario.road.centerline_y(x) + goal_offset, scenario.reference_speed, 0.0;
    points.push_back(Reference{state, mask});
  }
  return ReferenceTrajectory(std::move(points));
}

}  // namespace capnmpc
