#include "fuzznav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace fuzznav::sim {

namespace {

double fold(double x, double lo, double hi, double& sign) {
  const double span = hi - lo;
  if (span <= 0.0) {
    sign = 0.0;
    return 0.5 * (lo + hi);
  }
  double m = std::fmod(x - lo, 2.0 * span);
  if (m < 0.0) m += 2.0 * span;
  if (m > span) {
    sign = -1.0;
    return lo + 2.0 * span - m;
  }
  sign = 1.0;
  return lo + m;
}

Vec2 body_to_world(const robot::Pose& p, const Vec2& v) {
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double max_robot_speed(const Scenario& s) {
  const double wheel = std::max(s.controller.omega_max, s.motor.steady_state_speed(s.controller.bridge.v_max));
  return wheel * s.chassis.wheel_radius;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::GoalReached: return "GoalReached";
    case Status::Collision: return "Collision";
    case Status::Timeout: return "Timeout";
  }
  return "?";
}

int control_ticks(const Scenario& s) {
  const double ratio = s.control_period / s.dt;
  const double k = std::round(ratio);
  if (!(k >= 1.0) || std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio)) {
    throw ScenarioError("control_period must be a positive integer multiple of dt");
  }
  return static_cast<int>(k);
}

void validate(const Scenario& s) {
  if (s.random_world) throw ScenarioError("random world must be materialised before validation");
  if (!(s.dt > 0.0 && std::isfinite(s.dt))) throw ScenarioError("dt must be positive");
  if (!(s.duration >= s.dt && std::isfinite(s.duration))) throw ScenarioError("duration must be at least dt");
  control_ticks(s);
  if (!(s.robot_radius > 0.0)) throw ScenarioError("robot radius must be positive");
  if (!(s.goal_radius > 0.0)) throw ScenarioError("goal radius must be positive");
  try {
    s.motor.validate();
    s.chassis.validate();
    s.sensors.validate();
    s.controller.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  for (double v : {s.start.x, s.start.y, s.start.theta, s.goal.x, s.goal.y}) {
    if (!std::isfinite(v)) throw ScenarioError("start and goal must be finite");
  }
  if (s.bounds && !(s.bounds->min.x < s.bounds->max.x && s.bounds->min.y < s.bounds->max.y)) {
    throw ScenarioError("bounds must have min < max");
  }

  double min_radius = std::numeric_limits<double>::infinity();
  double max_obstacle_speed = 0.0;
  for (const auto& to : s.obstacles) {
    const auto& ob = to.obstacle;
    if (!(ob.radius > 0.0 && std::isfinite(ob.radius))) {
      throw ScenarioError("obstacle " + std::to_string(ob.id) + ": radius must be positive");
    }
    if (!(std::isfinite(ob.center.x) && std::isfinite(ob.center.y) && std::isfinite(ob.velocity.x) &&
          std::isfinite(ob.velocity.y))) {
      throw ScenarioError("obstacle " + std::to_string(ob.id) + ": non-finite position or velocity");
    }
    if (!(to.spawn_time >= 0.0) || !(to.despawn_time > to.spawn_time)) {
      throw ScenarioError("obstacle " + std::to_string(ob.id) + ": need 0 <= spawn < despawn");
    }
    if (to.spawn_time >= s.duration) {
      throw ScenarioError("obstacle " + std::to_string(ob.id) + ": spawn time beyond the scenario duration");
    }
    if (s.bounds && !to.robot_relative) {
      const auto& b = *s.bounds;
      if (ob.center.x < b.min.x + ob.radius || ob.center.x > b.max.x - ob.radius || ob.center.y < b.min.y + ob.radius ||
          ob.center.y > b.max.y - ob.radius) {
        throw ScenarioError("obstacle " + std::to_string(ob.id) + " does not fit inside the bounds");
      }
    }
    min_radius = std::min(min_radius, ob.radius);
    max_obstacle_speed = std::max(max_obstacle_speed, norm(ob.velocity));
  }
  const double step = (max_robot_speed(s) + max_obstacle_speed) * s.dt;
  if (!s.obstacles.empty() && !(step < min_radius)) {
    throw ScenarioError("dt too large: " + std::to_string(step) + " m of relative motion per step against a " +
                        std::to_string(min_radius) + " m obstacle");
  }

  nav::PlannerConfig pc = s.controller.planner;
  pc.robot_radius = s.robot_radius;
  for (const auto& to : s.obstacles) {
    if (to.spawn_time > 0.0 || to.robot_relative) continue;
    const double r = nav::inflated_radius(to.obstacle, pc);
    if (distance(s.goal, to.obstacle.center) < r) {
      throw nav::UnreachableGoal("unreachable goal: within " + std::to_string(r) + " m of obstacle " +
                                 std::to_string(to.obstacle.id));
    }
  }
}

Scenario spawn_event(const Scenario& s, double t, const sensors::Obstacle& obstacle, bool robot_relative) {
  if (!(t >= 0.0 && t < s.duration)) throw ScenarioError("spawn time must lie in [0, duration)");
  Scenario out = s;
  TimedObstacle to;
  to.obstacle = obstacle;
  to.spawn_time = t;
  to.robot_relative = robot_relative;
  out.obstacles.push_back(to);
  return out;
}

Scenario materialize(const Scenario& s) {
  if (!s.random_world) return s;
  const RandomWorld& w = *s.random_world;
  if (!(w.size > 2.0 && w.radius_min > 0.0 && w.radius_max >= w.radius_min && w.speed_max >= 0.0 &&
        w.static_count >= 0 && w.moving_count >= 0 && w.min_start_goal < w.size)) {
    throw ScenarioError("inconsistent random world parameters");
  }
  Scenario out = s;
  out.random_world.reset();
  out.obstacles.clear();
  out.bounds = Bounds{{0.0, 0.0}, {w.size, w.size}};

  std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32), 0x3a5du};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> coord(1.0, w.size - 1.0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  out.start = {coord(rng), coord(rng), angle(rng)};
  do {
    out.goal = {coord(rng), coord(rng)};
  } while (distance(out.goal, out.start.position()) < w.min_start_goal);

  nav::PlannerConfig pc = s.controller.planner;
  pc.robot_radius = s.robot_radius;
  std::uniform_real_distribution<double> radius(w.radius_min, w.radius_max);
  std::uniform_real_distribution<double> speed(0.5 * w.speed_max, w.speed_max);
  const int total = w.static_count + w.moving_count;
  for (int placed = 0, attempts = 0; placed < total; ++attempts) {
    if (attempts > 100000) throw ScenarioError("could not place random obstacles");
    sensors::Obstacle ob;
    ob.id = placed + 1;
    ob.radius = radius(rng);
    std::uniform_real_distribution<double> c(ob.radius, w.size - ob.radius);
    ob.center = {c(rng), c(rng)};
    if (placed >= w.static_count) {
      const double a = angle(rng), v = speed(rng);
      ob.velocity = {v * std::cos(a), v * std::sin(a)};
    }
    bool ok = distance(ob.center, out.start.position()) >= ob.radius + s.robot_radius + w.start_margin &&
              nav::keep_out_distance(ob, pc, out.goal) >= 0.0;
    for (const auto& other : out.obstacles) {
      ok = ok && distance(ob.center, other.obstacle.center) >= ob.radius + other.obstacle.radius;
    }
    if (!ok) continue;
    out.obstacles.push_back({ob, 0.0, std::numeric_limits<double>::infinity(), false});
    ++placed;
  }
  return out;
}

std::vector<sensors::Obstacle> obstacles_at(const std::vector<TimedObstacle>& obstacles,
                                            const std::optional<Bounds>& bounds, double t) {
  std::vector<sensors::Obstacle> world;
  for (const auto& to : obstacles) {
    if (t + 1e-9 < to.spawn_time || t + 1e-9 >= to.despawn_time) continue;
    sensors::Obstacle ob = to.obstacle;
    const double age = t - to.spawn_time;
    ob.center = ob.center + ob.velocity * age;
    if (bounds && (ob.velocity.x != 0.0 || ob.velocity.y != 0.0)) {
      double sx = 1.0, sy = 1.0;
      ob.center.x = fold(ob.center.x, bounds->min.x + ob.radius, bounds->max.x - ob.radius, sx);
      ob.center.y = fold(ob.center.y, bounds->min.y + ob.radius, bounds->max.y - ob.radius, sy);
      ob.velocity = {ob.velocity.x * sx, ob.velocity.y * sy};
    }
    world.push_back(ob);
  }
  return world;
}

nav::NavigationEngine scenario_engine(const Scenario& s) {
  nav::EngineBuildOptions opts;
  opts.omega_max = s.controller.omega_max;
  return s.engine ? nav::build_navigation_engine(*s.engine, opts) : nav::build_navigation_engine(opts);
}

TrajectoryLog run_scenario(const Scenario& input, const nav::NavigationEngine& engine) {
  const Scenario s = materialize(input);
  validate(s);
  const int k = control_ticks(s);
  const long steps = std::lround(s.duration / s.dt);

  nav::NavigatorConfig nc = s.controller;
  nc.fusion_alpha = s.sensors.fusion_alpha;
  nc.goal_radius = s.goal_radius;
  nc.planner.robot_radius = s.robot_radius;
  nav::Navigator navigator(engine, nc, s.goal);
  sensors::SensorSuite suite(s.sensors, s.start, s.seed);

  TrajectoryLog log;
  log.name = s.name;
  log.seed = s.seed;
  log.dt = s.dt;
  log.goal = s.goal;
  log.obstacles = s.obstacles;
  log.bounds = s.bounds;
  log.goal_radius = s.goal_radius;
  log.ticks.reserve(static_cast<std::size_t>(steps) + 1);

  robot::RobotState state{s.start, {}, {}};
  nav::WheelCommand command;
  for (long i = 0;; ++i) {
    const double t = static_cast<double>(i) * s.dt;
    for (auto& to : log.obstacles) {
      if (to.robot_relative && t + 1e-9 >= to.spawn_time) {
        to.obstacle.center = state.pose.position() + body_to_world(state.pose, to.obstacle.center);
        to.obstacle.velocity = body_to_world(state.pose, to.obstacle.velocity);
        to.robot_relative = false;
      }
    }
    const auto world = obstacles_at(log.obstacles, s.bounds, t);
    const auto frame = suite.sense(t, state.pose, world);

    Tick tick;
    tick.t = t;
    tick.truth = state.pose;
    tick.frame = frame;
    if (i % k == 0) {
      const auto out = navigator.update(frame, t, world);
      command = out.command;
      tick.fused = out.fused;
      tick.replanned = out.replanned;
    } else {
      tick.fused = sensors::fuse_location(frame.gps_now(), frame.odometry, nc.fusion_alpha);
    }
    tick.command = command;
    std::tie(tick.volts_left, tick.volts_right) =
        nav::speed_to_voltage(command, state.left, state.right, s.motor, nc.bridge);
    tick.left = state.left;
    tick.right = state.right;
    int hit = -1;
    for (const auto& ob : world) {
      const double gap = distance(ob.center, state.pose.position()) - ob.radius - s.robot_radius;
      if (gap < tick.clearance) tick.clearance = gap;
      if (gap < 0.0 && hit < 0) hit = ob.id;
    }
    log.ticks.push_back(tick);

    if (hit >= 0) {
      log.terminal = {Status::Collision, t, hit};
      break;
    }
    if (distance(state.pose.position(), s.goal) < s.goal_radius) {
      log.terminal = {Status::GoalReached, t, -1};
      break;
    }
    if (i >= steps) {
      log.terminal = {Status::Timeout, t, -1};
      break;
    }
    const auto res = robot::robot_step(state, tick.volts_left, tick.volts_right, s.chassis, s.motor, s.dt);
    state = res.state;
    suite.integrate_encoders(res.left_rotation, res.right_rotation, s.chassis);
  }
  log.plans = navigator.plans();
  return log;
}

TrajectoryLog run_scenario(const Scenario& s) {
  const auto engine = scenario_engine(s);
  return run_scenario(s, engine);
}

std::vector<double> active_tracking_error(const TrajectoryLog& log) {
  std::vector<double> out;
  out.reserve(log.ticks.size());
  if (log.ticks.empty()) return out;
  const std::vector<Vec2> straight{log.ticks.front().truth.position(), log.goal};
  std::size_t plan = 0;
  for (const auto& tick : log.ticks) {
    while (plan + 1 < log.plans.size() && log.plans[plan + 1].time <= tick.t) ++plan;
    const auto& path = log.plans.empty() ? straight : log.plans[plan].path.waypoints;
    out.push_back(nav::distance_to_path(path, tick.truth.position()));
  }
  return out;
}

namespace {

Metrics summary(const TrajectoryLog& log, const std::vector<double>& err) {
  Metrics m;
  m.status = log.terminal.status;
  m.end_time = log.terminal.time;
  if (m.status == Status::GoalReached) m.time_to_goal = log.terminal.time;
  m.collision_count = m.status == Status::Collision ? 1 : 0;
  m.replans = log.plans.empty() ? 0 : static_cast<int>(log.plans.size()) - 1;
  for (std::size_t i = 0; i < log.ticks.size(); ++i) {
    if (i > 0) m.path_length += distance(log.ticks[i - 1].truth.position(), log.ticks[i].truth.position());
    m.min_obstacle_clearance = std::min(m.min_obstacle_clearance, log.ticks[i].clearance);
  }
  if (!log.ticks.empty()) m.final_distance = distance(log.ticks.back().truth.position(), log.goal);
  double sum = 0.0;
  for (double e : err) {
    sum += e;
    m.max_tracking_error = std::max(m.max_tracking_error, e);
  }
  if (!err.empty()) m.mean_tracking_error = sum / static_cast<double>(err.size());
  return m;
}

}  // namespace

Metrics metrics(const TrajectoryLog& log, const nav::PlannedPath& planned) {
  std::vector<Vec2> pts;
  pts.reserve(log.ticks.size());
  for (const auto& tick : log.ticks) pts.push_back(tick.truth.position());
  return summary(log, nav::tracking_error(planned, pts));
}

Metrics metrics(const TrajectoryLog& log) { return summary(log, active_tracking_error(log)); }

}  // namespace fuzznav::sim
