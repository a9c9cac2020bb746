#include "fuzznav/log_io.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace fuzznav::sim {

using nlohmann::json;

std::string format_double(double v) {
  if (v == 0.0) return "0";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

std::string trajectory_csv(const TrajectoryLog& log) {
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (const auto& k : log.ticks) {
    const double row[] = {k.t,
                          k.truth.x,
                          k.truth.y,
                          k.truth.theta,
                          k.fused.x,
                          k.fused.y,
                          k.frame.ranges.front,
                          k.frame.ranges.back,
                          k.frame.ranges.left,
                          k.frame.ranges.right,
                          k.command.omega_left,
                          k.command.omega_right,
                          k.volts_left,
                          k.volts_right,
                          k.left.omega,
                          k.right.omega};
    bool first = true;
    for (double v : row) {
      if (!first) out += ',';
      out += format_double(v);
      first = false;
    }
    out += '\n';
  }
  return out;
}

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json points(const std::vector<Vec2>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

}  // namespace

json metrics_json(const Metrics& m, const TrajectoryLog& log) {
  return {{"name", log.name},
          {"seed", log.seed},
          {"status", to_string(m.status)},
          {"end_time", num(m.end_time)},
          {"time_to_goal", num(m.time_to_goal)},
          {"path_length", num(m.path_length)},
          {"final_distance", num(m.final_distance)},
          {"min_obstacle_clearance", num(m.min_obstacle_clearance)},
          {"mean_tracking_error", num(m.mean_tracking_error)},
          {"max_tracking_error", num(m.max_tracking_error)},
          {"collision_count", m.collision_count},
          {"collision_obstacle", log.terminal.obstacle_id},
          {"replans", m.replans},
          {"ticks", log.ticks.size()},
          {"dt", log.dt}};
}

json plans_json(const TrajectoryLog& log) {
  json arr = json::array();
  for (const auto& p : log.plans) {
    arr.push_back({{"time", p.time},
                   {"reason", p.reason},
                   {"waypoints", points(p.path.waypoints)},
                   {"timestamps", p.path.timestamps}});
  }
  return arr;
}

}  // namespace fuzznav::sim
