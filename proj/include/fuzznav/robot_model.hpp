#pragma once

// Differential-drive plant: per-wheel DC motors (armature circuit + rotor)
// driving the wheels directly, and exact-arc integration of the body pose.

#include <stdexcept>

#include "fuzznav/geometry.hpp"

namespace fuzznav::robot {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |omega| below this is integrated as a straight line [rad/s].
inline constexpr double kStraightEpsilon = 1e-6;

struct Pose {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad, (-pi, pi]

  Vec2 position() const { return {x, y}; }
};

/// Body-frame velocity; the lateral component is zero by construction.
struct BodyTwist {
  double v = 0.0;      // m/s along the body x axis
  double omega = 0.0;  // rad/s, counter-clockwise positive
};

struct MotorState {
  double omega = 0.0;    // shaft speed, rad/s
  double current = 0.0;  // armature current, A
};

struct MotorParams {
  double Kt = 0.1;   // torque constant, N*m/A
  double Ke = 0.1;   // back-emf constant, V*s/rad
  double R = 1.0;    // ohm
  double L = 0.5;    // H
  double J = 0.01;   // kg*m^2
  double b = 0.1;    // viscous damping, N*m*s

  /// Throws std::invalid_argument unless every constant is strictly positive.
  void validate() const;
  /// Shaft speed reached under a constant voltage.
  double steady_state_speed(double volts) const { return Kt * volts / (R * b + Kt * Ke); }
};

struct ChassisParams {
  double wheel_radius = 0.07;  // m
  double axle_length = 0.32;   // m, distance between the driven wheels
  double mass = 6.0;           // kg; carried for reference, the motor model has no chassis load

  void validate() const;
};

BodyTwist body_twist(double omega_left, double omega_right, const ChassisParams& chassis);

/// Signed distance from the axle midpoint to the instantaneous centre of
/// curvature; +infinity when the wheel speeds are equal.
double icc_radius(double v_left, double v_right, double axle_length);

/// Exact constant-twist arc over dt (straight line when |omega| < kStraightEpsilon).
Pose pose_step(const Pose& p, const BodyTwist& t, double dt);

/// One classical RK4 step of the armature/rotor ODE under constant voltage.
MotorState motor_step(const MotorState& s, double volts, const MotorParams& mp, double dt);

struct RobotState {
  Pose pose;
  MotorState left;
  MotorState right;
};

struct RobotStepResult {
  RobotState state;
  double left_rotation = 0.0;   // wheel angle travelled during the step, rad
  double right_rotation = 0.0;
};

/// Motors, then wheel speeds, then body twist, then pose. The twist over the
/// step uses the mean wheel speed (trapezoidal rotation of each wheel).
RobotStepResult robot_step(const RobotState& s, double volts_left, double volts_right, const ChassisParams& chassis,
                           const MotorParams& mp, double dt);

}  // namespace fuzznav::robot
