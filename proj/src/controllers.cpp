#include "plugpull/controllers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "plugpull/errors.hpp"

namespace plugpull::ctrl {

Vec3 position_control(const UamGains& gains, const Vec3& position, const Vec3& velocity,
                      const Vec3& position_d, const Vec3& velocity_d, const Vec3& force_hat_body,
                      const RotationMatrix& body_to_world) {
  return gains.mass_hat * (gains.g_hat * Vec3::UnitZ() - gains.kd * (velocity - velocity_d) -
                           gains.kp * (position - position_d)) -
         body_to_world * force_hat_body;
}

ThrustAttitude extract_thrust_attitude(const Vec3& u_d, const EulerAngles& att) {
  const Vec3 v = math::psi_matrix(att.yaw) * u_d;
  const double c1 = std::cos(att.roll);
  const double c2 = std::cos(att.pitch);
  ThrustAttitude out;
  out.thrust = v.z() / (c1 * c2);
  if (!(out.thrust >= kMinThrust)) {
    throw DegenerateThrust("extract_thrust_attitude: thrust " + std::to_string(out.thrust) +
                           " N below minimum");
  }
  const double a1 = v.y() / out.thrust;
  const double a2 = v.x() / (out.thrust * c1);
  if (std::abs(a1) > 1.0 || std::abs(a2) > 1.0) {
    throw DegenerateThrust("extract_thrust_attitude: requested tilt is geometrically infeasible");
  }
  out.roll = std::asin(a1);
  out.pitch = std::asin(a2);
  return out;
}

ThrustAttitude extract_thrust_attitude_saturated(const Vec3& u_d, const EulerAngles& att,
                                                 double tilt_limit) {
  constexpr double kAsinLimit = 1.0 - 1e-9;
  const Vec3 v = math::psi_matrix(att.yaw) * u_d;
  const double c1 = std::cos(att.roll);
  const double c2 = std::cos(att.pitch);
  ThrustAttitude out;
  out.thrust = std::max(v.z() / (c1 * c2), kMinThrust);
  const double a1 = std::clamp(v.y() / out.thrust, -kAsinLimit, kAsinLimit);
  const double a2 = std::clamp(v.x() / (out.thrust * c1), -kAsinLimit, kAsinLimit);
  out.roll = std::clamp(std::asin(a1), -tilt_limit, tilt_limit);
  out.pitch = std::clamp(std::asin(a2), -tilt_limit, tilt_limit);
  return out;
}

Vec3 attitude_rate_control(const UamGains& gains, const EulerAngles& att_d, const EulerAngles& att) {
  return gains.kr * (att_d.vec() - att.vec());
}

HapticSetpoint admittance_step(const AdmittanceGains& gains, const HapticSetpoint& setpoint,
                               const Vec4& tau_ext_hat, const Vec4& tau_fb, const Mat34& jacobian,
                               const Vec3& force_hat_body, double dt) {
  const Vec4 net = tau_ext_hat + tau_fb +
                   jacobian.transpose() * (gains.force_reflection_scale * force_hat_body);
  const Vec4 accel = gains.inertia.ldlt().solve(net - gains.damping * setpoint.rate);
  HapticSetpoint next = setpoint;
  next.rate = setpoint.rate + dt * accel;
  next.theta = setpoint.theta + dt * next.rate;
  return next;
}

Vec4 recentering_torque(const Mat4& k_fb, const Vec4& theta, const Vec4& theta0) {
  return -k_fb * (theta - theta0);
}

GripperSetpoint gripper_compliance_step(const AdmittanceGains& gains, double angle_d,
                                        double rate_d, double angle, double angle0,
                                        double grip_torque, double dt) {
  const double accel =
      -gains.k_dg * rate_d - gains.k_fbg * (angle - angle0) + gains.k_tau * grip_torque;
  const double rate = rate_d + dt * accel;
  return {angle_d + dt * rate, rate};
}

Vec4 arm_joint_servo(const ServoGains& gains, const Vec4& theta, const Vec4& rate,
                     const HapticSetpoint& setpoint, const Vec4& gravity) {
  return gravity - gains.arm_kp * (theta - setpoint.theta) - gains.arm_kd * (rate - setpoint.rate);
}

double gripper_servo(const ServoGains& gains, double angle, double rate, double angle_d,
                     double rate_d) {
  return -gains.grip_kp * (angle - angle_d) - gains.grip_kd * (rate - rate_d);
}

}  // namespace plugpull::ctrl
