#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fuzznav/sensors.hpp"
#include "oracles/ray_march.hpp"

using namespace fuzznav;
using namespace fuzznav::sensors;
using robot::Pose;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Obstacle> random_world(std::mt19937_64& rng, const Pose& robot) {
  std::uniform_real_distribution<double> pos(-5, 5), rad(0.1, 1.0);
  std::vector<Obstacle> w;
  const int n = 1 + static_cast<int>(rng() % 10);
  while (static_cast<int>(w.size()) < n) {
    Obstacle ob{static_cast<int>(w.size()), {pos(rng), pos(rng)}, rad(rng), {}};
    if (distance(ob.center, robot.position()) > ob.radius + 0.05) w.push_back(ob);
  }
  return w;
}

Vec2 rotate(const Vec2& v, double a) {
  return {std::cos(a) * v.x - std::sin(a) * v.y, std::sin(a) * v.x + std::cos(a) * v.y};
}

}  // namespace

TEST_CASE("ultrasonic_scan examples") {
  Ranges r = ultrasonic_scan({}, {}, 4.0);
  CHECK(r.front == 4.0);
  CHECK(r.back == 4.0);
  CHECK(r.left == 4.0);
  CHECK(r.right == 4.0);

  r = ultrasonic_scan({}, {{1, {3.0, 0.0}, 0.5, {}}}, 4.0);
  CHECK(r.front == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(r.back == 4.0);
  CHECK(r.left == 4.0);
  CHECK(r.right == 4.0);

  // Heading pi/2: the same disc now sits on the right.
  r = ultrasonic_scan({0, 0, kPi / 2}, {{1, {3.0, 0.0}, 0.5, {}}}, 4.0);
  CHECK(r.right == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(r.front == 4.0);

  r = ultrasonic_scan({0.1, 0, 0}, {{1, {0.0, 0.0}, 0.5, {}}}, 4.0);
  CHECK(r.front == 0.0);
  CHECK(r.back == 0.0);
  CHECK(r.left == 0.0);
  CHECK(r.right == 0.0);
}

TEST_CASE("ray_circle corner cases") {
  CHECK(std::isinf(ray_circle({0, 0}, {1, 0}, {-3, 0}, 1.0)));
  CHECK(std::isinf(ray_circle({0, 0}, {1, 0}, {3, 2}, 1.0)));
  CHECK(ray_circle({0, 0}, {1, 0}, {3, 1}, 1.0) == doctest::Approx(3.0));
  CHECK(ray_circle({0, 0}, {1, 0}, {0.5, 0}, 1.0) == 0.0);
}

TEST_CASE("ultrasonic_scan against the ray-march oracle") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  double worst = 0;
  for (int k = 0; k < 200; ++k) {
    const Pose p{0.0, 0.0, ang(rng)};
    const auto world = random_world(rng, p);
    const Ranges r = ultrasonic_scan(p, world, 4.0);
    const double got[] = {r.front, r.back, r.left, r.right};
    const double offs[] = {0.0, kPi, kPi / 2, -kPi / 2};
    for (int i = 0; i < 4; ++i) {
      const double want = oracle::ray_march(p.position(), p.theta + offs[i], world, 4.0, 1e-4);
      worst = std::max(worst, std::abs(got[i] - want));
      CHECK(got[i] >= 0.0);
      CHECK(got[i] <= 4.0);
    }
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("ultrasonic_scan is rotation and translation equivariant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-kPi, kPi), shift(-50, 50);
  for (int k = 0; k < 300; ++k) {
    const Pose p{0.0, 0.0, ang(rng)};
    const auto world = random_world(rng, p);
    const double a = ang(rng);
    const Vec2 t{shift(rng), shift(rng)};
    auto moved = world;
    for (auto& ob : moved) ob.center = rotate(ob.center, a) + t;
    const Pose q{t.x, t.y, wrap_angle(p.theta + a)};
    const Ranges r1 = ultrasonic_scan(p, world, 4.0);
    const Ranges r2 = ultrasonic_scan(q, moved, 4.0);
    CHECK(std::abs(r1.front - r2.front) <= 1e-9);
    CHECK(std::abs(r1.back - r2.back) <= 1e-9);
    CHECK(std::abs(r1.left - r2.left) <= 1e-9);
    CHECK(std::abs(r1.right - r2.right) <= 1e-9);
  }
}

TEST_CASE("gps_read noise statistics and determinism") {
  NoiseStream exact(1);
  const Vec2 g = gps_read({1.5, -2.0, 0.3}, 0.0, exact);
  CHECK(g.x == 1.5);
  CHECK(g.y == -2.0);

  NoiseStream noise(2024);
  const int n = 100000;
  double sx = 0, sy = 0, sxx = 0, syy = 0;
  for (int k = 0; k < n; ++k) {
    const Vec2 v = gps_read({}, 2.0, noise);
    sx += v.x;
    sy += v.y;
    sxx += v.x * v.x;
    syy += v.y * v.y;
  }
  const double stdx = std::sqrt((sxx - sx * sx / n) / (n - 1));
  const double stdy = std::sqrt((syy - sy * sy / n) / (n - 1));
  CHECK(stdx >= 1.96);
  CHECK(stdx <= 2.04);
  CHECK(stdy >= 1.96);
  CHECK(stdy <= 2.04);
  CHECK(std::abs(sx / n) < 0.03);

  NoiseStream a(99), b(99);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 va = gps_read({}, 2.0, a);
    const Vec2 vb = gps_read({}, 2.0, b);
    CHECK(va == vb);
  }
}

TEST_CASE("encoder_update examples") {
  const robot::ChassisParams ch;
  OdometryState odo;
  odo.pose = {1.0, 1.0, kPi / 2};
  const auto moved = encoder_update(odo, 2.0, 2.0, ch);
  CHECK(moved.pose.x == doctest::Approx(1.0));
  CHECK(moved.pose.y == doctest::Approx(1.0 + 2.0 * ch.wheel_radius).epsilon(1e-14));
  CHECK(moved.pose.theta == doctest::Approx(kPi / 2));
  CHECK(moved.left_angle == 2.0);

  const auto still = encoder_update(odo, 0.0, 0.0, ch);
  CHECK(still.pose.x == odo.pose.x);
  CHECK(still.pose.y == odo.pose.y);
  CHECK(still.pose.theta == odo.pose.theta);
}

TEST_CASE("dead reckoning tracks the true pose with ideal encoders") {
  const robot::ChassisParams ch;
  const robot::MotorParams mp;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> v(-24, 24);
  robot::RobotState s;
  s.pose = {2.0, -1.0, 0.4};
  OdometryState odo;
  odo.pose = s.pose;
  double vl = v(rng), vr = v(rng);
  for (int k = 0; k < 6000; ++k) {
    if (k % 100 == 0) {
      vl = v(rng);
      vr = v(rng);
    }
    const auto r = robot::robot_step(s, vl, vr, ch, mp, 0.01);
    odo = encoder_update(odo, r.left_rotation, r.right_rotation, ch);
    s = r.state;
  }
  CHECK(distance(odo.pose.position(), s.pose.position()) <= 1e-4);
  CHECK(std::abs(wrap_angle(odo.pose.theta - s.pose.theta)) <= 1e-6);
}

TEST_CASE("fuse_location blends") {
  const Pose odo{0.0, 0.0, 1.0};
  CHECK(fuse_location({2.0, 0.0}, odo, 1.0) == Vec2{2.0, 0.0});
  CHECK(fuse_location({2.0, 0.0}, odo, 0.0) == Vec2{0.0, 0.0});
  CHECK(fuse_location({2.0, 0.0}, odo, 0.5) == Vec2{1.0, 0.0});
}

TEST_CASE("equirectangular projection round trip") {
  const GeoOrigin origin{45.0, 7.0};
  const Vec2 xy = project(45.0 + 1e-4, 7.0 + 1e-4, origin);
  CHECK(xy.y == doctest::Approx(kEarthRadius * 1e-4 * kPi / 180));
  CHECK(xy.x == doctest::Approx(kEarthRadius * std::cos(kPi / 4) * 1e-4 * kPi / 180));
  double lat = 0, lon = 0;
  unproject(xy, origin, lat, lon);
  CHECK(lat == doctest::Approx(45.0 + 1e-4).epsilon(1e-14));
  CHECK(lon == doctest::Approx(7.0 + 1e-4).epsilon(1e-14));
}

TEST_CASE("SensorSuite holds fixes between updates and is reproducible") {
  SensorConfig cfg;
  cfg.gps_sigma = 2.0;
  cfg.gps_rate = 1.0;
  const Pose start{0, 0, 0};
  SensorSuite a(cfg, start, 5), b(cfg, start, 5);
  Vec2 last;
  int changes = 0;
  for (int k = 0; k <= 300; ++k) {
    const double t = k * 0.01;
    const auto fa = a.sense(t, start, {});
    const auto fb = b.sense(t, start, {});
    CHECK(fa.gps_xy == fb.gps_xy);
    if (k > 0 && !(fa.gps_xy == last)) ++changes;
    last = fa.gps_xy;
  }
  CHECK(changes == 3);

  SensorConfig bad = cfg;
  bad.fusion_alpha = 1.5;
  CHECK_THROWS_AS(SensorSuite(bad, start, 1), std::invalid_argument);
}

TEST_CASE("ideal sensors fuse to the true position") {
  SensorConfig cfg;
  cfg.gps_sigma = 0.0;
  cfg.fusion_alpha = 0.37;
  const robot::ChassisParams ch;
  const robot::MotorParams mp;
  robot::RobotState s;
  SensorSuite suite(cfg, s.pose, 3);
  for (int k = 0; k < 3000; ++k) {
    const auto r = robot::robot_step(s, 10.0, 8.0, ch, mp, 0.01);
    suite.integrate_encoders(r.left_rotation, r.right_rotation, ch);
    s = r.state;
    const auto f = suite.sense((k + 1) * 0.01, s.pose, {});
    if (k % 100 == 99) {
      CHECK(distance(fuse_location(f.gps_now(), f.odometry, cfg.fusion_alpha), s.pose.position()) <= 1e-4);
    }
  }
}
