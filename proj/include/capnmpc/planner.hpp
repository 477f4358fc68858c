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

#ifndef CAPNMPC__PLANNER_HPP_
#define CAPNMPC__PLANNER_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "capnmpc/dynamics.hpp"
#include "capnmpc/estimator.hpp"

namespace capnmpc {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2 &) const = default;
};

enum class CenterlineKind { straight, sine };

/// Two-lane road around a centerline y = c(x). Straight roads run along +x.
struct RoadGeometry {
  CenterlineKind kind = CenterlineKind::straight;
  double amplitude = 0.0;     // [m], sine only
  double wavelength = 100.0;  // [m], sine only
  double width = 10.0;        // [m], total

  double centerline_y(double x) const;
  double centerline_slope(double x) const;
  double centerline_heading(double x) const;
};

/// Signed vertical offset from the centerline (positive = left of travel).
double lateral_offset(const VehicleState & s, const RoadGeometry & road);

/// |offset| - (width/2 - half_width); <= 0 keeps the car body on the road.
double road_constraint(const VehicleState & s, const RoadGeometry & road, double vehicle_half_width);

/// safety_radius - center distance; <= 0 when clear.
double obstacle_constraint(const VehicleState & s, const Point2 & obstacle, double safety_radius);

struct ControlBounds {
  ControlInput lower{-3.0, -0.5};
  ControlInput upper{3.0, 0.5};
};

/// (a_lo - a, delta_lo - delta, a - a_hi, delta - delta_hi).
std::array<double, 4> control_bound_constraints(const ControlInput & u, const ControlBounds & bounds);

ControlInput clamp_to_bounds(const ControlInput & u, const ControlBounds & bounds);

enum class ObstacleKind { fixed, moving };

struct Obstacle {
  ObstacleKind kind = ObstacleKind::fixed;
  Point2 initial;
  double cruise_speed = 5.0;       // [m/s], moving only
  double trigger_distance = 20.0;  // [m], moving only
};

/// Runtime obstacle state. Moving obstacles keep their initial lateral
/// offset from the centerline and latch `active` once triggered.
struct ObstacleState {
  Point2 position;
  double lane_offset = 0.0;
  bool active = false;
};

struct Scenario {
  std::string name;
  RoadGeometry road;
  std::vector<Obstacle> obstacles;
  VehicleState ego_init;
  Point2 goal;
  double reference_speed = 8.0;
  ControlBounds bounds;
  std::size_t episode_length = 200;
  double goal_tolerance = 2.0;
  double dt = 0.2;
  double safety_radius = 4.47;
  double planning_margin = 0.75;  // [m] added to safety_radius inside the planner only
  double vehicle_half_width = 1.0;
  double wheelbase = kDefaultWheelbase;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

std::vector<ObstacleState> initial_obstacle_states(const Scenario & scenario);

/// Advances triggered obstacles by one step. A moving obstacle activates once
/// its along-road lead over the ego drops below the trigger distance and then
/// moves along its lane at cruise speed regardless of the ego.
void update_obstacles(
  const Scenario & scenario, const VehicleState & ego, std::vector<ObstacleState> & obstacles);

std::vector<Point2> obstacle_positions(const std::vector<ObstacleState> & obstacles);

/// Road, per-obstacle and control-bound constraints with obstacle positions
/// frozen for the whole horizon. m = 1 + #obstacles + 4.
class PlanningConstraints final : public ConstraintEvaluator {
public:
  PlanningConstraints(const Scenario & scenario, std::vector<Point2> obstacles);

  std::size_t size() const override { return 1 + obstacles_.size() + 4; }
  void evaluate(std::span<const double> x, std::span<const double> u, std::size_t t, std::span<double> g)
    const override;

private:
  RoadGeometry road_;
  ControlBounds bounds_;
  double half_width_;
  double safety_radius_;
  std::vector<Point2> obstacles_;
};

PlanningConstraints assemble_constraints(const Scenario & scenario, std::vector<Point2> obstacles);
PlanningConstraints assemble_constraints(const Scenario & scenario);

/// Goal position, reference speed on the velocity channel, heading free.
ReferenceTrajectory goal_reference(const Scenario & scenario, std::size_t horizon);

/// Per-step reference used in closed loop: a point that leaves the ego's
/// along-road position at the reference speed, rides the goal's lateral
/// offset from the centerline, and stops at the goal.
ReferenceTrajectory road_reference(
  const Scenario & scenario, const VehicleState & ego, std::size_t horizon);

struct EpisodeResult {
  std::vector<VehicleState> states;    // T' + 1 entries
  std::vector<ControlInput> controls;  // T' applied controls
  std::vector<double> min_obstacle_distance;  // per state; +inf without obstacles
  std::vector<double> boundary_margin;        // per state; >= 0 on the road
  std::vector<Point2> final_obstacles;
  bool success = false;
  bool collision = false;
  std::optional<std::size_t> steps_to_goal;
  double min_distance_overall = 0.0;
  std::string failure;  // estimator diagnostics when the episode aborted

  /// Ego ends ahead (along the road) of every obstacle.
  bool overtook_all() const;
  /// Boundary margin non-negative at every recorded state.
  bool stayed_on_road() const;
};

/// Closed-loop receding-horizon episode. The controller plans with
/// `controller_model`; the plant is always the analytic bicycle. Applied
/// controls are saturated at the scenario bounds.
EpisodeResult run_episode(
  const Scenario & scenario, const DynamicsModel & controller_model, const SolverConfig & cfg);

namespace scenarios {

/// Straight road with three stationary obstacles across both lanes.
Scenario scenario1();
/// Sine road with three vehicles that start moving when the ego approaches.
Scenario scenario2();
/// Straight road, no obstacles, goal straight ahead.
Scenario open_road();

/// Returns the builtin scenario by name; throws ConfigError for unknown names.
Scenario builtin(const std::string & name);

}  // namespace scenarios

}  // namespace capnmpc

#endif  // CAPNMPC__PLANNER_HPP_
