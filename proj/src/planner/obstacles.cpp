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

#include "capnmpc/planner.hpp"

namespace capnmpc {

std::vector<ObstacleState> initial_obstacle_states(const Scenario & scenario)
{
  std::vector<ObstacleState> states;
  states.reserve(scenario.obstacles.size());
  for (const Obstacle & o : scenario.obstacles) {
    ObstacleState s;
    s.position = o.initial;
    s.lane_offset = o.initial.y - scenario.road.centerline_y(o.initial.x);
    s.active = false;
    states.push_back(s);
  }
  return states;
}

void update_obstacles(
  const Scenario & scenario, const VehicleState & ego, std::vector<ObstacleState> & obstacles)
{
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const Obstacle & params = scenario.obstacles[i];
    ObstacleState & state = obstacles[i];
    if (params.kind != ObstacleKind::moving) {
      continue;
    }
    if (!state.active && state.position.x - ego.px < params.trigger_distance) {
      state.active = true;
    }
    if (!state.active) {
      continue;
    }
    // arc length speed * dt along the lane, one explicit step in x
    const double slope = scenario.road.centerline_slope(state.position.x);
    state.position.x += params.cruise_speed * scenario.dt / std::sqrt(1.0 + slope * slope);
    state.position.y = scenario.road.centerline_y(state.position.x) + state.lane_offset;
  }
}

std::vector<Point2> obstacle_positions(const std::vector<ObstacleState> & obstacles)
{
  std::vector<Point2> out;
  out.reserve(obstacles.size());
  for (const ObstacleState & o : obstacles) {
    out.push_back(o.position);
  }
  return out;
}

}  // namespace capnmpc
