#include "fuzznav/sensors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fuzznav::sensors {

void SensorConfig::validate() const {
  if (!(max_range > 0.0 && std::isfinite(max_range))) throw std::invalid_argument("max_range must be positive");
  if (!(gps_sigma >= 0.0 && std::isfinite(gps_sigma))) throw std::invalid_argument("gps sigma must be >= 0");
  if (!(gps_rate > 0.0 && std::isfinite(gps_rate))) throw std::invalid_argument("gps rate must be positive");
  if (!(fusion_alpha >= 0.0 && fusion_alpha <= 1.0)) throw std::invalid_argument("fusion alpha must lie in [0, 1]");
  if (!(compass_sigma >= 0.0 && std::isfinite(compass_sigma))) throw std::invalid_argument("compass sigma must be >= 0");
}

double NoiseStream::gaussian(double sigma) {
  if (sigma == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(engine_);
}

double ray_circle(const Vec2& origin, const Vec2& dir, const Vec2& center, double radius) {
  const Vec2 f = origin - center;
  const double c = dot(f, f) - radius * radius;
  if (c <= 0.0) return 0.0;
  const double b = dot(f, dir);
  if (b >= 0.0) return std::numeric_limits<double>::infinity();  // pointing away
  const double disc = b * b - c;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  // Near root written as c / (-b + sqrt(disc)) to avoid cancellation.
  return c / (-b + std::sqrt(disc));
}

Ranges ultrasonic_scan(const robot::Pose& pose, const std::vector<Obstacle>& world, double max_range) {
  const Vec2 o = pose.position();
  for (const auto& ob : world) {
    if (distance(o, ob.center) <= ob.radius) return {0.0, 0.0, 0.0, 0.0};
  }
  auto cast = [&](double offset) {
    const double a = pose.theta + offset;
    const Vec2 dir{std::cos(a), std::sin(a)};
    double best = max_range;
    for (const auto& ob : world) best = std::min(best, ray_circle(o, dir, ob.center, ob.radius));
    return best;
  };
  constexpr double half_pi = std::numbers::pi / 2;
  return {cast(0.0), cast(std::numbers::pi), cast(half_pi), cast(-half_pi)};
}

Vec2 gps_read(const robot::Pose& pose, double sigma, NoiseStream& noise) {
  const double nx = noise.gaussian(sigma);
  const double ny = noise.gaussian(sigma);
  return {pose.x + nx, pose.y + ny};
}

OdometryState encoder_update(const OdometryState& odo, double dtheta_left, double dtheta_right,
                             const robot::ChassisParams& chassis) {
  OdometryState out = odo;
  out.left_angle += dtheta_left;
  out.right_angle += dtheta_right;
  // Increments over a unit interval are the average wheel speeds times dt.
  out.pose = robot::pose_step(odo.pose, robot::body_twist(dtheta_left, dtheta_right, chassis), 1.0);
  return out;
}

Vec2 fuse_location(const Vec2& gps, const robot::Pose& odometry, double alpha) {
  return {alpha * gps.x + (1.0 - alpha) * odometry.x, alpha * gps.y + (1.0 - alpha) * odometry.y};
}

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

Vec2 project(double lat_deg, double lon_deg, const GeoOrigin& origin) {
  return {kEarthRadius * std::cos(origin.lat0_deg * kDeg) * (lon_deg - origin.lon0_deg) * kDeg,
          kEarthRadius * (lat_deg - origin.lat0_deg) * kDeg};
}

void unproject(const Vec2& xy, const GeoOrigin& origin, double& lat_deg, double& lon_deg) {
  lat_deg = origin.lat0_deg + xy.y / kEarthRadius / kDeg;
  lon_deg = origin.lon0_deg + xy.x / (kEarthRadius * std::cos(origin.lat0_deg * kDeg)) / kDeg;
}

SensorSuite::SensorSuite(const SensorConfig& config, const robot::Pose& start, std::uint64_t seed)
    : config_(config), noise_(seed) {
  config_.validate();
  odo_.pose = start;
  held_fix_ = start.position();
  odo_at_fix_ = held_fix_;
}

void SensorSuite::integrate_encoders(double dtheta_left, double dtheta_right, const robot::ChassisParams& chassis) {
  odo_ = encoder_update(odo_, dtheta_left, dtheta_right, chassis);
}

SensorFrame SensorSuite::sense(double t, const robot::Pose& truth, const std::vector<Obstacle>& world) {
  if (t * config_.gps_rate + 1e-9 >= static_cast<double>(next_fix_)) {
    held_fix_ = gps_read(truth, config_.gps_sigma, noise_);
    odo_at_fix_ = odo_.pose.position();
    next_fix_ = static_cast<long>(std::floor(t * config_.gps_rate + 1e-9)) + 1;
  }
  SensorFrame f;
  f.ranges = ultrasonic_scan(truth, world, config_.max_range);
  f.gps_xy = held_fix_;
  f.odometry_at_fix = odo_at_fix_;
  f.heading = wrap_angle(truth.theta + noise_.gaussian(config_.compass_sigma));
  f.odometry = odo_.pose;
  f.timestamp = t;
  return f;
}

}  // namespace fuzznav::sensors
