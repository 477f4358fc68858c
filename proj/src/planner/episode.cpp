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
#include <limits>

#include "capnmpc/errors.hpp"
#include "capnmpc/planner.hpp"

namespace capnmpc {
namespace {

double min_center_distance(const VehicleState & s, const std::vector<ObstacleState> & obstacles)
{
  double best = std::numeric_limits<double>::infinity();
  for (const ObstacleState & o : obstacles) {
    best = std::min(best, std::hypot(s.px - o.position.x, s.py - o.position.y));
  }
  return best;
}

}  // namespace

bool EpisodeResult::overtook_all() const
{
  if (states.empty()) {
    return false;
  }
  const double ego_x = states.back().px;
  return std::all_of(final_obstacles.begin(), final_obstacles.end(), [&](const Point2 & o) {
    return ego_x > o.x;
  });
}

bool EpisodeResult::stayed_on_road() const
{
  return std::all_of(boundary_margin.begin(), boundary_margin.end(), [](double m) { return m >= 0.0; });
}

EpisodeResult run_episode(
  const Scenario & scenario, const DynamicsModel & controller_model, const SolverConfig & cfg)
{
  scenario.validate();
  SolverConfig solver = cfg;
  solver.dt = scenario.dt;
  solver.validate_for(controller_model);

  EpisodeResult result;
  std::vector<ObstacleState> obstacles = initial_obstacle_states(scenario);
  VehicleState state = scenario.ego_init;

  auto record = [&](const VehicleState & s) {
    result.states.push_back(s);
    const double d = min_center_distance(s, obstacles);
    result.min_obstacle_distance.push_back(d);
    result.boundary_margin.push_back(-road_constraint(s, scenario.road, scenario.vehicle_half_width));
    if (d < scenario.safety_radius) {
      result.collision = true;
    }
  };
  auto at_goal = [&](const VehicleState & s) {
    return std::hypot(s.px - scenario.goal.x, s.py - scenario.goal.y) <= scenario.goal_tolerance;
  };

  record(state);
  CapNmpc controller(solver);
  bool reached = at_goal(state);
  if (reached) {
    result.steps_to_goal = 0;
  }
  for (std::size_t k = 0; k < scenario.episode_length && !reached && !result.collision; ++k) {
    const PlanningConstraints constraints =
      assemble_constraints(scenario, obstacle_positions(obstacles));
    const ReferenceTrajectory refs = road_reference(scenario, state, solver.horizon);
    const auto x = state.to_array();
    NmpcSolution solution;
    try {
      solution = controller.solve(controller_model, constraints, refs, x);
    } catch (const DegenerateHorizonError & e) {
      result.failure = e.what();
      break;
    } catch (const DegenerateSmoothingError & e) {
      result.failure = e.what();
      break;
    } catch (const InvalidInputError & e) {
      result.failure = e.what();
      break;
    }
    const ControlInput applied =
      clamp_to_bounds(ControlInput::from(std::span<const double>(solution.control.data(), 2)), scenario.bounds);
    state = bicycle_step(state, applied, scenario.dt, scenario.wheelbase);
    update_obstacles(scenario, state, obstacles);
    result.controls.push_back(applied);
    record(state);
    if (at_goal(state)) {
      reached = true;
      result.steps_to_goal = k + 1;
    }
  }

  result.final_obstacles = obstacle_positions(obstacles);
  result.min_distance_overall =
    *std::min_element(result.min_obstacle_distance.begin(), result.min_obstacle_distance.end());
  result.success = reached && !result.collision && result.failure.empty();
  return result;
}

}  // namespace capnmpc
