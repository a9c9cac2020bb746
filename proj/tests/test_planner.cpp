#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fuzznav/planner.hpp"

using namespace fuzznav;
using namespace fuzznav::nav;
using sensors::Obstacle;

namespace {

// Nearest-point scan over every segment, sampled densely and refined.
double brute_distance(const std::vector<Vec2>& path, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  if (path.size() == 1) return std::hypot(p.x - path[0].x, p.y - path[0].y);
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vec2 a = path[i - 1], b = path[i];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double u = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    u = std::min(1.0, std::max(0.0, u));
    best = std::min(best, std::hypot(a.x + u * dx - p.x, a.y + u * dy - p.y));
  }
  return best;
}

// Minimum distance from a disc centre to a polyline, by fine sampling.
double sampled_clearance(const std::vector<Vec2>& path, const Vec2& c) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < path.size(); ++i) {
    for (int k = 0; k <= 2000; ++k) {
      const double u = k / 2000.0;
      const Vec2 q{path[i - 1].x + u * (path[i].x - path[i - 1].x), path[i - 1].y + u * (path[i].y - path[i - 1].y)};
      best = std::min(best, std::hypot(q.x - c.x, q.y - c.y));
    }
  }
  return best;
}

std::vector<Obstacle> random_world(std::mt19937_64& rng, const Vec2& start, const Vec2& goal, const PlannerConfig& cfg) {
  std::uniform_real_distribution<double> pos(0, 20), rad(0.2, 1.2), vel(-0.5, 0.5);
  std::vector<Obstacle> world;
  while (world.size() < 8) {
    Obstacle ob{static_cast<int>(world.size()), {pos(rng), pos(rng)}, rad(rng), {}};
    if (world.size() >= 6) ob.velocity = {vel(rng), vel(rng)};
    if (keep_out_distance(ob, cfg, start) < 0.1 || keep_out_distance(ob, cfg, goal) < 0.1) continue;
    world.push_back(ob);
  }
  return world;
}

}  // namespace

TEST_CASE("empty world gives the straight segment") {
  const auto p = plan_path({1, 2}, {9, -3}, {}, {}, 4.0);
  REQUIRE(p.waypoints.size() == 2);
  CHECK(p.waypoints[0] == Vec2{1, 2});
  CHECK(p.waypoints[1] == Vec2{9, -3});
  CHECK(p.timestamps[0] == 4.0);
  CHECK(p.timestamps[1] == doctest::Approx(4.0 + std::hypot(8.0, 5.0)));
}

TEST_CASE("a disc on the midpoint deflects the path by the inflated radius") {
  const PlannerConfig cfg;
  const Obstacle ob{1, {5, 0}, 1.0, {}};
  const auto p = plan_path({0, 0}, {10, 0}, {ob}, cfg);
  CHECK(p.waypoints.size() > 2);
  const double r = inflated_radius(ob, cfg);
  CHECK(r == doctest::Approx(1.85));
  CHECK(distance_to_path(p.waypoints, ob.center) >= r);
  CHECK(sampled_clearance(p.waypoints, ob.center) >= r);
  // Not a wild detour: within the circumscribing polygon's overhead.
  CHECK(p.length() < 10.0 + 2.0 * r);
}

TEST_CASE("moving obstacles keep out the ground they sweep over the horizon") {
  const PlannerConfig cfg;
  const Obstacle ob{0, {}, 0.5, {0.3, 0.4}};
  const double r = 0.5 + 0.25 + 0.6;
  CHECK(inflated_radius(ob, cfg) == doctest::Approx(r));
  // The sweep ends at (0.9, 1.2) after 3 s.
  CHECK(keep_out_distance(ob, cfg, {3, 0}) == doctest::Approx(std::hypot(2.1, 1.2) - r));
  CHECK(keep_out_distance(ob, cfg, {-1, 0}) == doctest::Approx(1.0 - r));
  CHECK(keep_out_distance(ob, cfg, {0.45, 0.6}) == doctest::Approx(-r));
  const auto discs = keep_out_discs(ob, cfg);
  REQUIRE(discs.size() == 4);
  CHECK(discs.front().center == Vec2{});
  CHECK(discs.back().center.x == doctest::Approx(0.9));
  CHECK(discs.back().center.y == doctest::Approx(1.2));
  for (const auto& d : discs) CHECK(d.radius == doctest::Approx(r));

  const Obstacle still{1, {2, 2}, 0.5, {}};
  REQUIRE(keep_out_discs(still, cfg).size() == 1);
  CHECK(keep_out_distance(still, cfg, {2, 0}) == doctest::Approx(2.0 - r));
}

TEST_CASE("a start inside a moving sweep leaves it first") {
  const PlannerConfig cfg;
  // Heading for the start from 2 m away at 0.5 m/s.
  const Obstacle ob{4, {2, 0}, 0.5, {-0.5, 0}};
  const auto p = plan_path({0, 0}, {0, 10}, {ob}, cfg);
  REQUIRE(p.waypoints.size() >= 3);
  CHECK(p.waypoints[1].x == doctest::Approx(-0.9));
  CHECK(p.waypoints[1].y == doctest::Approx(0.0));
  CHECK(keep_out_distance(ob, cfg, p.waypoints[1]) == doctest::Approx(0.05));
  CHECK(p.waypoints.back() == Vec2{0, 10});
}

TEST_CASE("a static region over the start shrinks to let the robot out") {
  const PlannerConfig cfg;
  const Obstacle ob{2, {1.0, 0}, 0.3, {}};
  REQUIRE(keep_out_distance(ob, cfg, {0, 0}) < 0.0);
  const auto p = plan_path({0, 0}, {10, 0}, {ob}, cfg);
  CHECK(p.waypoints.size() > 2);
  CHECK(sampled_clearance(p.waypoints, ob.center) >= 1.0 - 1e-3);
}

TEST_CASE("random worlds keep every path point clear of every obstacle") {
  const PlannerConfig cfg;
  std::mt19937_64 rng(101);
  int planned = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Vec2 start{0.5, 0.5}, goal{19.5, 19.5};
    const auto world = random_world(rng, start, goal, cfg);
    PlannedPath p;
    try {
      p = plan_path(start, goal, world, cfg);
    } catch (const NoPathFound&) {
      continue;
    }
    ++planned;
    CHECK(p.waypoints.front() == start);
    CHECK(p.waypoints.back() == goal);
    for (const auto& ob : world) {
      CHECK(sampled_clearance(p.waypoints, ob.center) - ob.radius >= cfg.robot_radius + cfg.clearance - 1e-9);
      for (const auto& d : keep_out_discs(ob, cfg)) CHECK(sampled_clearance(p.waypoints, d.center) >= d.radius - 1e-9);
    }
    for (std::size_t i = 1; i < p.timestamps.size(); ++i) CHECK(p.timestamps[i] > p.timestamps[i - 1]);
  }
  CHECK(planned >= 50);
}

TEST_CASE("goal inside an inflated obstacle is unreachable") {
  const Obstacle ob{3, {10, 0}, 0.5, {}};
  CHECK_THROWS_AS(plan_path({0, 0}, {10.8, 0}, {ob}, {}), UnreachableGoal);
  CHECK_NOTHROW(plan_path({0, 0}, {12, 0}, {ob}, {}));
}

TEST_CASE("a closed ring around the goal has no path") {
  std::vector<Obstacle> ring;
  for (int k = 0; k < 12; ++k) {
    const double a = 2.0 * 3.14159265358979 * k / 12;
    ring.push_back({k, {10 + 4 * std::cos(a), 4 * std::sin(a)}, 1.2, {}});
  }
  CHECK_THROWS_AS(plan_path({0, 0}, {10, 0}, ring, {}), NoPathFound);
}

TEST_CASE("a disc containing the start is ignored") {
  const Obstacle ob{0, {0.5, 0}, 0.5, {}};
  const auto p = plan_path({0, 0}, {10, 0}, {ob}, {});
  CHECK(p.waypoints.size() == 2);
}

TEST_CASE("tracking_error examples") {
  PlannedPath straight;
  straight.waypoints = {{0, 0}, {10, 0}};
  std::vector<Vec2> same = {{0, 0}, {2.5, 0}, {10, 0}};
  for (double e : tracking_error(straight, same)) CHECK(e == 0.0);

  std::vector<Vec2> offset;
  for (int k = 0; k <= 10; ++k) offset.push_back({static_cast<double>(k), 0.3});
  for (double e : tracking_error(straight, offset)) CHECK(e == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("tracking_error matches a brute-force nearest-segment scan") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_int_distribution<int> n(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    PlannedPath p;
    const int m = n(rng);
    for (int k = 0; k < m; ++k) p.waypoints.push_back({u(rng), u(rng)});
    std::vector<Vec2> actual;
    for (int k = 0; k < 50; ++k) actual.push_back({u(rng), u(rng)});
    const auto err = tracking_error(p, actual);
    REQUIRE(err.size() == actual.size());
    for (std::size_t k = 0; k < actual.size(); ++k) {
      CHECK(err[k] == doctest::Approx(brute_distance(p.waypoints, actual[k])).epsilon(1e-12));
    }
  }
}

TEST_CASE("path follower steers a lookahead ahead and never moves backwards") {
  PlannedPath p;
  p.waypoints = {{0, 0}, {10, 0}, {10, 10}};
  PathFollower f(p, 1.0);
  auto t = f.advance({0, 0.2});
  CHECK(t.steer_point.x == doctest::Approx(1.0));
  CHECK(t.steer_point.y == doctest::Approx(0.0));
  CHECK(t.remaining == doctest::Approx(std::hypot(1.0, 0.2) + 19.0));

  t = f.advance({9.6, 0.0});
  CHECK(t.steer_point.x == doctest::Approx(10.0));
  CHECK(t.steer_point.y == doctest::Approx(0.6));

  // Falling back does not rewind the projection.
  t = f.advance({5.0, 0.0});
  CHECK(t.projection.x == doctest::Approx(9.6));

  t = f.advance({10.0, 9.8});
  CHECK(t.steer_point == Vec2{10, 10});
  CHECK(t.remaining == doctest::Approx(0.2));
  const auto rest = f.remaining_path();
  REQUIRE(rest.size() == 2);
  CHECK(rest[0].y == doctest::Approx(9.8));
}

TEST_CASE("path follower does not skip ahead on a folded path") {
  PlannedPath p;
  p.waypoints = {{0, 0}, {10, 0}, {10, 1}, {0, 1}};
  PathFollower f(p, 1.0);
  const auto t = f.advance({2.0, 0.6});
  CHECK(t.projection.y == doctest::Approx(0.0));
  CHECK(t.steer_point.x == doctest::Approx(3.0));
}
