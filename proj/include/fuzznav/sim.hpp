#pragma once

// Fixed-step scenario runner: world, sensors, controller and plant on one clock.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzznav/navigator.hpp"
#include "fuzznav/planner.hpp"
#include "fuzznav/robot_model.hpp"
#include "fuzznav/sensors.hpp"

namespace fuzznav::sim {

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TimedObstacle {
  sensors::Obstacle obstacle;
  double spawn_time = 0.0;
  double despawn_time = std::numeric_limits<double>::infinity();
  // Center and velocity given in the robot frame at spawn time.
  bool robot_relative = false;
};

/// Rectangle that moving obstacles bounce inside.
struct Bounds {
  Vec2 min;
  Vec2 max;
};

/// Parameters for a seeded random world.
struct RandomWorld {
  double size = 20.0;  // m, square side
  int static_count = 8;
  int moving_count = 2;
  double radius_min = 0.3;
  double radius_max = 0.8;
  double speed_max = 0.5;       // m/s
  double min_start_goal = 10.0;  // m
  double start_margin = 1.0;     // m of free space around the start beyond contact
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  double duration = 60.0;        // s
  double dt = 0.01;              // s, physics step
  double control_period = 0.01;  // s, integer multiple of dt
  robot::ChassisParams chassis;
  robot::MotorParams motor;
  double robot_radius = 0.25;  // m, collision footprint
  robot::Pose start;
  Vec2 goal;
  double goal_radius = 0.2;
  std::vector<TimedObstacle> obstacles;
  std::optional<Bounds> bounds;
  std::optional<RandomWorld> random_world;  // obstacles, start and goal drawn from the seed
  sensors::SensorConfig sensors;
  nav::NavigatorConfig controller;
  std::optional<nlohmann::json> engine;  // engine document; the built-in table otherwise
};

/// Throws ScenarioError on inconsistent fields and nav::UnreachableGoal when
/// the goal starts inside an inflated obstacle. Random worlds must be
/// materialised first.
void validate(const Scenario& s);

/// Physics steps per control update.
int control_ticks(const Scenario& s);

/// Copy with an obstacle inserted at time t.
Scenario spawn_event(const Scenario& s, double t, const sensors::Obstacle& obstacle, bool robot_relative = false);

/// Replaces random_world by concrete start, goal and obstacles drawn from s.seed.
Scenario materialize(const Scenario& s);

/// Obstacles present at time t, at their positions then. Robot-relative
/// spawns must already be anchored.
std::vector<sensors::Obstacle> obstacles_at(const std::vector<TimedObstacle>& obstacles,
                                            const std::optional<Bounds>& bounds, double t);

enum class Status { GoalReached, Collision, Timeout };
const char* to_string(Status s);

struct Terminal {
  Status status = Status::Timeout;
  double time = 0.0;
  int obstacle_id = -1;  // collision partner
};

struct Tick {
  double t = 0.0;
  robot::Pose truth;
  Vec2 fused;
  sensors::SensorFrame frame;
  nav::WheelCommand command;
  double volts_left = 0.0;
  double volts_right = 0.0;
  robot::MotorState left;
  robot::MotorState right;
  double clearance = std::numeric_limits<double>::infinity();  // robot edge to nearest obstacle edge
  bool replanned = false;
};

struct TrajectoryLog {
  std::string name;
  std::uint64_t seed = 0;
  double dt = 0.0;
  Vec2 goal;
  double goal_radius = 0.0;
  std::vector<Tick> ticks;
  Terminal terminal;
  std::vector<nav::PlanRecord> plans;
  std::vector<TimedObstacle> obstacles;  // anchored, for plotting
  std::optional<Bounds> bounds;
};

/// Runs a validated (materialised) scenario. Throws ScenarioError or
/// nav::UnreachableGoal before stepping.
TrajectoryLog run_scenario(const Scenario& s, const nav::NavigationEngine& engine);
/// Builds the engine from the scenario, materialises random worlds, then runs.
TrajectoryLog run_scenario(const Scenario& s);

nav::NavigationEngine scenario_engine(const Scenario& s);

struct Metrics {
  Status status = Status::Timeout;
  double end_time = 0.0;
  double time_to_goal = std::numeric_limits<double>::quiet_NaN();
  double path_length = 0.0;
  double final_distance = 0.0;
  double min_obstacle_clearance = std::numeric_limits<double>::infinity();
  double mean_tracking_error = 0.0;
  double max_tracking_error = 0.0;
  int collision_count = 0;
  int replans = 0;
};

/// Tracking error of the true position against the plan in force at each tick
/// (the straight start-goal segment when no plan was made).
std::vector<double> active_tracking_error(const TrajectoryLog& log);

Metrics metrics(const TrajectoryLog& log, const nav::PlannedPath& planned);
/// Tracking stats against the active plan.
Metrics metrics(const TrajectoryLog& log);

}  // namespace fuzznav::sim
