#include "fuzznav/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "fuzznav/default_engine.hpp"
#include "fuzznav/fuzzy_json.hpp"
#include "fuzznav/rule_layers.hpp"

namespace fuzznav::nav {

using nlohmann::json;

TargetGeometry target_geometry(const Vec2& current, double heading, const Vec2& goal) {
  const Vec2 d = goal - current;
  const double dist = norm(d);
  if (dist < kGoalEpsilon) return {dist, 0.0};
  return {dist, wrap_angle(std::atan2(d.y, d.x) - heading)};
}

NavigationEngine::NavigationEngine(fuzzy::Engine engine, double omega_max)
    : engine_(std::move(engine)), omega_max_(omega_max) {
  for (const char* name : kInputNames) {
    if (engine_.input_index(name) >= engine_.input_count()) {
      throw fuzzy::ConfigError(std::string("navigation engine lacks input '") + name + "'");
    }
  }
  for (const char* name : kOutputNames) {
    if (engine_.output_index(name) >= engine_.output_count()) {
      throw fuzzy::ConfigError(std::string("navigation engine lacks output '") + name + "'");
    }
  }
  if (engine_.input_count() != kInputNames.size() || engine_.output_count() != kOutputNames.size()) {
    throw fuzzy::ConfigError("navigation engine must have exactly six inputs and two outputs");
  }
}

WheelCommand NavigationEngine::infer(const NavInputs& in) const {
  const double values[] = {in.target_distance, in.target_direction_error, in.obstacle_front,
                           in.obstacle_back,   in.obstacle_left,          in.obstacle_right};
  std::vector<double> crisp(kInputNames.size());
  for (std::size_t k = 0; k < kInputNames.size(); ++k) crisp[engine_.input_index(kInputNames[k])] = values[k];
  const std::vector<double> out = engine_.infer(crisp);
  return {out[engine_.output_index(kOutputNames[0])], out[engine_.output_index(kOutputNames[1])]};
}

fuzzy::RuleBase navigation_rule_base(const json& doc, double omega_max) {
  json flat = json::object();
  if (!doc.contains("variables")) throw fuzzy::ConfigError("engine document has no \"variables\"");
  flat["variables"] = doc.at("variables");
  json rules = doc.contains("layers") ? expand_rule_layers(doc.at("layers")) : json::array();
  if (doc.contains("rules")) {
    for (const auto& r : doc.at("rules")) rules.push_back(r);
  }
  flat["rules"] = rules;
  fuzzy::RuleBase rb = fuzzy::rule_base_from_json(flat);
  if (!(omega_max > 0.0 && std::isfinite(omega_max))) throw fuzzy::ConfigError("omega_max must be positive");
  for (auto& out : rb.outputs) {
    const double span = std::max(std::abs(out.lo()), std::abs(out.hi()));
    if (span != omega_max) out = out.with_scaled_universe(omega_max / span);
  }
  return rb;
}

const json& default_engine_document() {
  static const json doc = json::parse(detail::kDefaultEngineJson);
  return doc;
}

NavigationEngine build_navigation_engine(const json& doc, const EngineBuildOptions& opts) {
  fuzzy::RuleBase rb = navigation_rule_base(doc, opts.omega_max);
  fuzzy::ValidationReport report = fuzzy::validate_rulebase(rb, opts.validation_grid);
  if (!report.ok()) {
    throw RuleBaseInvalid("navigation rule base: " + std::to_string(report.gaps.size()) + " gap(s), " +
                              std::to_string(report.conflicts.size()) + " conflict(s)",
                          std::move(report));
  }
  return NavigationEngine(fuzzy::Engine(std::move(rb)), opts.omega_max);
}

NavigationEngine build_navigation_engine(const EngineBuildOptions& opts) {
  return build_navigation_engine(default_engine_document(), opts);
}

NavInputs nav_inputs(const sensors::SensorFrame& frame, const Vec2& steer_point, double remaining_distance,
                     double fusion_alpha) {
  const Vec2 fused = sensors::fuse_location(frame.gps_now(), frame.odometry, fusion_alpha);
  const TargetGeometry g = target_geometry(fused, frame.heading, steer_point);
  NavInputs in;
  in.target_distance = remaining_distance;
  in.target_direction_error = remaining_distance < kGoalEpsilon ? 0.0 : g.direction_error;
  in.obstacle_front = frame.ranges.front;
  in.obstacle_back = frame.ranges.back;
  in.obstacle_left = frame.ranges.left;
  in.obstacle_right = frame.ranges.right;
  return in;
}

WheelCommand control_step(const NavInputs& in, const NavigationEngine& engine) {
  WheelCommand cmd;
  try {
    cmd = engine.infer(in);
  } catch (const fuzzy::NoRuleFired&) {
    return {0.0, 0.0};
  }
  const double w = engine.omega_max();
  cmd.omega_left = std::clamp(cmd.omega_left, -w, w);
  cmd.omega_right = std::clamp(cmd.omega_right, -w, w);
  return cmd;
}

WheelCommand control_step(const sensors::SensorFrame& frame, const Vec2& goal, const NavigationEngine& engine,
                          double fusion_alpha) {
  const Vec2 fused = sensors::fuse_location(frame.gps_now(), frame.odometry, fusion_alpha);
  return control_step(nav_inputs(frame, goal, distance(fused, goal), fusion_alpha), engine);
}

std::pair<double, double> speed_to_voltage(const WheelCommand& cmd, const robot::MotorState& left,
                                           const robot::MotorState& right, const robot::MotorParams& mp,
                                           const VoltageBridge& bridge) {
  const double gain = mp.R * mp.b / mp.Kt + mp.Ke;
  auto volts = [&](double set, double actual) {
    return std::clamp(gain * set + bridge.kp * (set - actual), -bridge.v_max, bridge.v_max);
  };
  return {volts(cmd.omega_left, left.omega), volts(cmd.omega_right, right.omega)};
}

void NavigatorConfig::validate() const {
  if (!(omega_max > 0.0)) throw std::invalid_argument("omega_max must be positive");
  if (!(bridge.v_max > 0.0)) throw std::invalid_argument("v_max must be positive");
  if (!(bridge.kp >= 0.0)) throw std::invalid_argument("kp must be >= 0");
  if (!(lookahead > 0.0)) throw std::invalid_argument("lookahead must be positive");
  if (!(corridor >= 0.0)) throw std::invalid_argument("corridor must be >= 0");
  if (!(replan_rate > 0.0)) throw std::invalid_argument("replan rate must be positive");
  if (!(fusion_alpha >= 0.0 && fusion_alpha <= 1.0)) throw std::invalid_argument("fusion alpha must lie in [0, 1]");
  if (!(goal_radius >= 0.0)) throw std::invalid_argument("goal radius must be >= 0");
  if (!(planner.robot_radius > 0.0)) throw std::invalid_argument("robot radius must be positive");
  if (!(planner.clearance >= 0.0)) throw std::invalid_argument("clearance must be >= 0");
  if (planner.polygon_sides < 3) throw std::invalid_argument("planner polygon needs at least 3 sides");
}

Navigator::Navigator(const NavigationEngine& engine, NavigatorConfig config, Vec2 goal)
    : engine_(&engine), config_(std::move(config)), goal_(goal) {
  config_.validate();
}

bool Navigator::corridor_blocked(const std::vector<sensors::Obstacle>& world) const {
  const std::vector<Vec2> rest = follower_->remaining_path();
  for (const auto& ob : world) {
    const double reach = ob.radius + config_.planner.robot_radius + config_.corridor;
    // Sample where a moving obstacle will be over the planner horizon.
    const int samples = ob.velocity == Vec2{} ? 1 : 5;
    for (int k = 0; k < samples; ++k) {
      const Vec2 c = ob.center + ob.velocity * (config_.planner.moving_horizon * k / 4.0);
      if (distance_to_path(rest, c) < reach) return true;
    }
  }
  return false;
}

namespace {

bool outside_all(const std::vector<sensors::Obstacle>& world, const PlannerConfig& cfg, const Vec2& p) {
  for (const auto& ob : world) {
    if (keep_out_distance(ob, cfg, p) < 0.0) return false;
  }
  return true;
}

// Nearest free point to the goal on rings of growing radius, ties going to
// the point closest to the robot.
std::optional<Vec2> holding_point(const Vec2& pos, const Vec2& goal, const std::vector<sensors::Obstacle>& world,
                                  const PlannerConfig& cfg) {
  constexpr int kAngles = 32;
  for (int ring = 1; ring <= 40; ++ring) {
    const double rho = 0.125 * ring;
    std::optional<Vec2> best;
    for (int k = 0; k < kAngles; ++k) {
      const double a = 2.0 * std::numbers::pi * k / kAngles;
      const Vec2 p = goal + Vec2{std::cos(a), std::sin(a)} * rho;
      if (!outside_all(world, cfg, p)) continue;
      if (!best || distance(p, pos) < distance(*best, pos)) best = p;
    }
    if (best) return best;
  }
  return std::nullopt;
}

}  // namespace

void Navigator::replan(const Vec2& pos, double t, const std::vector<sensors::Obstacle>& world, const char* reason) {
  std::vector<sensors::Obstacle> considered;
  bool traffic = false;
  for (auto ob : world) {
    const bool covers = keep_out_distance(ob, config_.planner, goal_) < 0.0;
    if (covers && ob.velocity != Vec2{}) {
      traffic = true;
    } else if (covers) {
      // A static disc over the goal shrinks to leave it outside; one on the
      // goal itself is left to the reactive layers.
      ob.radius += keep_out_distance(ob, config_.planner, goal_) - 1e-6;
    }
    if (ob.radius > 0.0) considered.push_back(ob);
  }
  // Moving traffic over the goal: wait beside it rather than drive through.
  Vec2 target = goal_;
  holding_ = false;
  if (traffic) {
    if (const auto hold = holding_point(pos, goal_, considered, config_.planner)) {
      target = *hold;
      holding_ = true;
    } else {
      std::erase_if(considered, [&](const sensors::Obstacle& ob) {
        return keep_out_distance(ob, config_.planner, goal_) < 0.0;
      });
    }
  }
  PlanRecord rec{t, {}, reason};
  try {
    rec.path = plan_path(pos, target, considered, config_.planner, t);
  } catch (const NoPathFound&) {
    rec.path = plan_path(pos, goal_, {}, config_.planner, t);
    rec.reason = "fallback";
    holding_ = false;
  }
  plans_.push_back(rec);
  follower_.emplace(rec.path, config_.lookahead);
  last_replan_ = t;
}

ControlOutput Navigator::update(const sensors::SensorFrame& frame, double t,
                                const std::vector<sensors::Obstacle>& world) {
  ControlOutput out;
  out.fused = sensors::fuse_location(frame.gps_now(), frame.odometry, config_.fusion_alpha);
  double remaining = distance(out.fused, goal_);
  out.steer_point = goal_;
  if (config_.use_planner) {
    if (!follower_) {
      replan(out.fused, t, world, "initial");
      out.replanned = true;
    } else if (t - last_replan_ >= 1.0 / config_.replan_rate - 1e-9 && (holding_ || corridor_blocked(world))) {
      replan(out.fused, t, world, holding_ ? "holding" : "intrusion");
      out.replanned = true;
    }
    const auto target = follower_->advance(out.fused);
    out.steer_point = target.steer_point;
    remaining = target.remaining;
  }
  if (distance(out.fused, goal_) < config_.goal_radius) {
    out.steer_point = goal_;
    remaining = 0.0;
  }
  out.inputs = nav_inputs(frame, out.steer_point, remaining, config_.fusion_alpha);
  out.command = control_step(out.inputs, *engine_);
  return out;
}

}  // namespace fuzznav::nav
