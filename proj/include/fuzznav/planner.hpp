#pragma once

// Shortest collision-free polyline around inflated obstacle discs, built on a
// visibility graph whose nodes are the corners of polygons circumscribing
// each disc (every polygon edge is tangent to its disc).

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fuzznav/geometry.hpp"
#include "fuzznav/sensors.hpp"

namespace fuzznav::nav {

class UnreachableGoal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No obstacle-free polyline connects start and goal.
class NoPathFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlannerConfig {
  double robot_radius = 0.25;   // m
  double clearance = 0.6;       // m, extra margin beyond the robot footprint
  double moving_horizon = 3.0;  // s; moving obstacles keep out the ground they cover in this time
  int polygon_sides = 16;
  double nominal_speed = 1.0;   // m/s, only used to stamp waypoint times
};

struct PlannedPath {
  std::vector<Vec2> waypoints;
  std::vector<double> timestamps;

  double length() const;
};

struct Disc {
  Vec2 center;
  double radius = 0.0;
};

/// Obstacle radius grown by the robot radius and the clearance.
double inflated_radius(const sensors::Obstacle& ob, const PlannerConfig& cfg);

/// Signed distance from p to the region the path keeps out of: the inflated
/// disc swept along the obstacle velocity over the horizon. Negative inside.
double keep_out_distance(const sensors::Obstacle& ob, const PlannerConfig& cfg, const Vec2& p);

/// The keep-out region covered by discs (one for a static obstacle).
std::vector<Disc> keep_out_discs(const sensors::Obstacle& ob, const PlannerConfig& cfg);

/// Throws UnreachableGoal when the goal lies in a keep-out region and
/// NoPathFound when the regions separate start from goal. From inside a
/// moving obstacle's region the path first leaves it sideways from the
/// obstacle's track; a static region containing the start shrinks to pass just
/// outside it. Obstacles the robot already touches are ignored.
PlannedPath plan_path(const Vec2& start, const Vec2& goal, const std::vector<sensors::Obstacle>& world,
                      const PlannerConfig& cfg, double start_time = 0.0);

/// Distance from each sample to the nearest point of the polyline.
std::vector<double> tracking_error(const PlannedPath& planned, const std::vector<Vec2>& actual);
double distance_to_path(const std::vector<Vec2>& path, const Vec2& p);

/// Pure-pursuit bookkeeping along a fixed path.
class PathFollower {
 public:
  PathFollower(PlannedPath path, double lookahead);

  struct Target {
    Vec2 steer_point;
    double remaining = 0.0;  // m, to the path end via the projection
    Vec2 projection;
  };

  /// Projects p onto the path (never moving backwards past the previous
  /// projection) and returns the point lookahead metres further along.
  Target advance(const Vec2& p);

  const PlannedPath& path() const { return path_; }
  /// Waypoints from the current projection to the end.
  std::vector<Vec2> remaining_path() const;

 private:
  PlannedPath path_;
  std::vector<double> cumulative_;  // arc length at each waypoint
  double lookahead_;
  std::size_t segment_ = 0;
  double progress_ = 0.0;  // arc length of the last projection
};

}  // namespace fuzznav::nav
