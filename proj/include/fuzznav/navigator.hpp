#pragma once

// Fuzzy navigation controller: six crisp inputs (goal distance and bearing
// error, four obstacle ranges) to two wheel-speed setpoints.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fuzznav/fuzzy.hpp"
#include "fuzznav/geometry.hpp"
#include "fuzznav/planner.hpp"
#include "fuzznav/robot_model.hpp"
#include "fuzznav/sensors.hpp"

namespace fuzznav::nav {

struct NavInputs {
  double target_distance = 0.0;         // m
  double target_direction_error = 0.0;  // rad, (-pi, pi]
  double obstacle_front = 0.0;          // m
  double obstacle_back = 0.0;
  double obstacle_left = 0.0;
  double obstacle_right = 0.0;
};

struct WheelCommand {
  double omega_left = 0.0;   // rad/s setpoint
  double omega_right = 0.0;
};

struct TargetGeometry {
  double distance = 0.0;
  double direction_error = 0.0;
};

/// Below this distance the bearing is undefined and reported as 0.
inline constexpr double kGoalEpsilon = 1e-9;

TargetGeometry target_geometry(const Vec2& current, double heading, const Vec2& goal);

/// Variable names of the navigation engine, in engine input order.
inline constexpr std::array<const char*, 6> kInputNames = {
    "target_distance", "direction_error", "obstacle_front", "obstacle_back", "obstacle_left", "obstacle_right"};
inline constexpr std::array<const char*, 2> kOutputNames = {"left_speed", "right_speed"};

struct EngineBuildOptions {
  double omega_max = 20.94;  // rescales the wheel-speed universes when it differs from the table
  int validation_grid = 5;
};

/// Validated fuzzy engine specialised to NavInputs.
class NavigationEngine {
 public:
  explicit NavigationEngine(fuzzy::Engine engine, double omega_max);

  const fuzzy::Engine& engine() const { return engine_; }
  double omega_max() const { return omega_max_; }

  /// Raw inference (no clamping); raises fuzzy::NoRuleFired.
  WheelCommand infer(const NavInputs& in) const;

 private:
  fuzzy::Engine engine_;
  double omega_max_;
};

/// Raised when the assembled rule base is incomplete or conflicting.
class RuleBaseInvalid : public fuzzy::ConfigError {
 public:
  RuleBaseInvalid(std::string what, fuzzy::ValidationReport report)
      : fuzzy::ConfigError(std::move(what)), report_(std::move(report)) {}
  const fuzzy::ValidationReport& report() const { return report_; }

 private:
  fuzzy::ValidationReport report_;
};

/// Variables, layered rule templates and flat rules from an engine document.
fuzzy::RuleBase navigation_rule_base(const nlohmann::json& doc, double omega_max);
/// The engine table shipped with the library.
const nlohmann::json& default_engine_document();

NavigationEngine build_navigation_engine(const nlohmann::json& doc, const EngineBuildOptions& opts = {});
NavigationEngine build_navigation_engine(const EngineBuildOptions& opts = {});

/// Inputs from a sensor frame: fused position, compass heading, ranges.
NavInputs nav_inputs(const sensors::SensorFrame& frame, const Vec2& steer_point, double remaining_distance,
                     double fusion_alpha);

/// Fused position -> target geometry -> inference -> clamp to +-omega_max;
/// (0, 0) if no rule fires.
WheelCommand control_step(const sensors::SensorFrame& frame, const Vec2& goal, const NavigationEngine& engine,
                          double fusion_alpha);
WheelCommand control_step(const NavInputs& in, const NavigationEngine& engine);

struct VoltageBridge {
  double kp = 1.0;      // V per rad/s of speed error
  double v_max = 24.0;  // V
};

/// Steady-state inversion plus proportional correction, clamped to +-v_max.
std::pair<double, double> speed_to_voltage(const WheelCommand& cmd, const robot::MotorState& left,
                                           const robot::MotorState& right, const robot::MotorParams& mp,
                                           const VoltageBridge& bridge);

struct NavigatorConfig {
  double omega_max = 20.94;
  VoltageBridge bridge;
  bool use_planner = true;
  PlannerConfig planner;
  double lookahead = 1.0;     // m, pure-pursuit distance along the path
  double corridor = 0.5;      // m, obstacle intrusion margin that triggers a replan
  double replan_rate = 2.0;   // Hz, upper bound on replans
  double fusion_alpha = 0.1;
  double goal_radius = 0.0;   // m; inside it the remaining distance reads zero

  void validate() const;
};

struct PlanRecord {
  double time = 0.0;
  PlannedPath path;
  std::string reason;  // "initial", "intrusion", "holding", "fallback"
};

struct ControlOutput {
  WheelCommand command;
  NavInputs inputs;
  Vec2 fused;
  Vec2 steer_point;
  bool replanned = false;
};

/// One robot's controller: path bookkeeping, replanning and the fuzzy step.
class Navigator {
 public:
  Navigator(const NavigationEngine& engine, NavigatorConfig config, Vec2 goal);

  ControlOutput update(const sensors::SensorFrame& frame, double t, const std::vector<sensors::Obstacle>& world);

  const std::vector<PlanRecord>& plans() const { return plans_; }
  const NavigatorConfig& config() const { return config_; }

 private:
  bool corridor_blocked(const std::vector<sensors::Obstacle>& world) const;
  void replan(const Vec2& pos, double t, const std::vector<sensors::Obstacle>& world, const char* reason);

  const NavigationEngine* engine_;
  NavigatorConfig config_;
  Vec2 goal_;
  std::vector<PlanRecord> plans_;
  std::optional<PathFollower> follower_;
  double last_replan_ = 0.0;
  bool holding_ = false;  // current plan ends short of the goal
};

}  // namespace fuzznav::nav
