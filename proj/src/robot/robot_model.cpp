#include "fuzznav/robot_model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fuzznav::robot {

void MotorParams::validate() const {
  const double values[] = {Kt, Ke, R, L, J, b};
  const char* names[] = {"Kt", "Ke", "R", "L", "J", "b"};
  for (int i = 0; i < 6; ++i) {
    if (!(std::isfinite(values[i]) && values[i] > 0.0)) {
      throw std::invalid_argument(std::string("motor parameter ") + names[i] + " must be positive");
    }
  }
}

void ChassisParams::validate() const {
  if (!(wheel_radius > 0.0 && std::isfinite(wheel_radius))) throw std::invalid_argument("wheel radius must be positive");
  if (!(axle_length > 0.0 && std::isfinite(axle_length))) throw std::invalid_argument("axle length must be positive");
}

BodyTwist body_twist(double omega_left, double omega_right, const ChassisParams& chassis) {
  const double r = chassis.wheel_radius;
  return {0.5 * r * (omega_right + omega_left), r * (omega_right - omega_left) / chassis.axle_length};
}

double icc_radius(double v_left, double v_right, double axle_length) {
  const double diff = v_right - v_left;
  if (std::abs(diff) < kStraightEpsilon) return std::numeric_limits<double>::infinity();
  return 0.5 * axle_length * (v_right + v_left) / diff;
}

Pose pose_step(const Pose& p, const BodyTwist& t, double dt) {
  const double dtheta = t.omega * dt;
  Pose out;
  if (std::abs(t.omega) < kStraightEpsilon) {
    out.x = p.x + t.v * dt * std::cos(p.theta);
    out.y = p.y + t.v * dt * std::sin(p.theta);
  } else {
    // R*(sin(th+dth) - sin th) rewritten through the half angle; identical in
    // exact arithmetic and free of cancellation for small dth.
    const double chord = 2.0 * (t.v / t.omega) * std::sin(0.5 * dtheta);
    const double mid = p.theta + 0.5 * dtheta;
    out.x = p.x + chord * std::cos(mid);
    out.y = p.y + chord * std::sin(mid);
  }
  out.theta = wrap_angle(p.theta + dtheta);
  return out;
}

namespace {

MotorState derivative(const MotorState& s, double volts, const MotorParams& mp) {
  return {(-mp.b * s.omega + mp.Kt * s.current) / mp.J, (-mp.Ke * s.omega - mp.R * s.current + volts) / mp.L};
}

MotorState axpy(const MotorState& s, double h, const MotorState& k) {
  return {s.omega + h * k.omega, s.current + h * k.current};
}

}  // namespace

MotorState motor_step(const MotorState& s, double volts, const MotorParams& mp, double dt) {
  if (!(std::isfinite(s.omega) && std::isfinite(s.current) && std::isfinite(volts))) {
    throw IntegrationError("motor state or input is not finite");
  }
  const MotorState k1 = derivative(s, volts, mp);
  const MotorState k2 = derivative(axpy(s, 0.5 * dt, k1), volts, mp);
  const MotorState k3 = derivative(axpy(s, 0.5 * dt, k2), volts, mp);
  const MotorState k4 = derivative(axpy(s, dt, k3), volts, mp);
  const MotorState out{s.omega + dt / 6.0 * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega),
                       s.current + dt / 6.0 * (k1.current + 2.0 * k2.current + 2.0 * k3.current + k4.current)};
  if (!(std::isfinite(out.omega) && std::isfinite(out.current))) {
    throw IntegrationError("motor integration diverged; reduce dt");
  }
  return out;
}

RobotStepResult robot_step(const RobotState& s, double volts_left, double volts_right, const ChassisParams& chassis,
                           const MotorParams& mp, double dt) {
  RobotStepResult r;
  r.state.left = motor_step(s.left, volts_left, mp, dt);
  r.state.right = motor_step(s.right, volts_right, mp, dt);
  r.left_rotation = 0.5 * (s.left.omega + r.state.left.omega) * dt;
  r.right_rotation = 0.5 * (s.right.omega + r.state.right.omega) * dt;
  const BodyTwist twist = body_twist(r.left_rotation / dt, r.right_rotation / dt, chassis);
  r.state.pose = pose_step(s.pose, twist, dt);
  return r;
}

}  // namespace fuzznav::robot
