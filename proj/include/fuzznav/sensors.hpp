#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fuzznav/geometry.hpp"
#include "fuzznav/robot_model.hpp"

namespace fuzznav::sensors {

struct Obstacle {
  int id = 0;
  Vec2 center;
  double radius = 0.5;  // m, > 0
  Vec2 velocity;        // m/s, zero for static obstacles
};

struct Ranges {
  double front = 0.0;
  double back = 0.0;
  double left = 0.0;
  double right = 0.0;
};

struct SensorFrame {
  Ranges ranges;
  Vec2 gps_xy;          // last fix, held between updates
  Vec2 odometry_at_fix;  // dead-reckoned position when that fix was taken
  double heading = 0.0;
  robot::Pose odometry;  // dead-reckoned pose at the same instant
  double timestamp = 0.0;

  /// Held fix carried forward by the odometry displacement since it was taken.
  Vec2 gps_now() const { return gps_xy + (odometry.position() - odometry_at_fix); }
};

struct SensorConfig {
  double max_range = 4.0;      // m
  double gps_sigma = 2.0;      // m, per axis
  double gps_rate = 1.0;       // Hz; the last fix is held in between
  double fusion_alpha = 0.1;   // weight of the GPS fix in the blend
  double compass_sigma = 0.0;  // rad

  void validate() const;
};

/// Single seeded source of all sensor noise.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : engine_(seed) {}
  double gaussian(double sigma);

 private:
  std::mt19937_64 engine_;
};

/// Distance along the ray origin + t*dir (dir unit length) to the first
/// intersection with the circle, or +infinity. 0 when origin lies inside.
double ray_circle(const Vec2& origin, const Vec2& dir, const Vec2& center, double radius);

/// Four body-frame rays (front 0, back pi, left pi/2, right -pi/2) from the
/// robot centre, clamped to max_range. All zero when the centre is inside an obstacle.
Ranges ultrasonic_scan(const robot::Pose& pose, const std::vector<Obstacle>& world, double max_range);

Vec2 gps_read(const robot::Pose& pose, double sigma, NoiseStream& noise);

struct OdometryState {
  robot::Pose pose;
  double left_angle = 0.0;   // accumulated wheel rotation, rad
  double right_angle = 0.0;
};

OdometryState encoder_update(const OdometryState& odo, double dtheta_left, double dtheta_right,
                             const robot::ChassisParams& chassis);

/// alpha*gps + (1-alpha)*odometry position.
Vec2 fuse_location(const Vec2& gps, const robot::Pose& odometry, double alpha);

struct GeoOrigin {
  double lat0_deg = 0.0;
  double lon0_deg = 0.0;
};

inline constexpr double kEarthRadius = 6371000.0;  // m

/// Local equirectangular projection of (lat, lon) in degrees around the origin.
Vec2 project(double lat_deg, double lon_deg, const GeoOrigin& origin);
void unproject(const Vec2& xy, const GeoOrigin& origin, double& lat_deg, double& lon_deg);

/// Sensor suite of one robot: holds the GPS fix between updates and the
/// odometry, and draws every noise sample from one stream.
class SensorSuite {
 public:
  SensorSuite(const SensorConfig& config, const robot::Pose& start, std::uint64_t seed);

  void integrate_encoders(double dtheta_left, double dtheta_right, const robot::ChassisParams& chassis);
  SensorFrame sense(double t, const robot::Pose& truth, const std::vector<Obstacle>& world);

  const SensorConfig& config() const { return config_; }
  const OdometryState& odometry() const { return odo_; }

 private:
  SensorConfig config_;
  NoiseStream noise_;
  OdometryState odo_;
  Vec2 held_fix_;
  Vec2 odo_at_fix_;
  long next_fix_ = 0;  // index of the next GPS fix
};

}  // namespace fuzznav::sensors
