#pragma once

#include "plugpull/spatial_math.hpp"

namespace plugpull::ctrl {

/// UAM position and attitude gains (defaults: experimental values).
struct UamGains {
  Mat3 kp = Vec3(4.00, 4.00, 8.00).asDiagonal();
  Mat3 kd = Vec3(3.00, 3.00, 4.80).asDiagonal();
  Mat3 kr = Vec3(12.0, 12.0, 10.0).asDiagonal();
  double mass_hat = 2.50;
  double g_hat = 9.81;
};

/// Haptic-device admittance, recentering, recovery and gripper gains.
struct AdmittanceGains {
  Mat4 inertia = Vec4(0.20, 0.20, 0.20, 0.20).asDiagonal();    // M_Hd
  Mat4 damping = Vec4(0.10, 0.50, 0.10, 0.10).asDiagonal();    // D_Hd
  Mat4 recenter = Vec4(3.00, 1.00, 7.50, 7.50).asDiagonal();   // K_fb
  Mat4 recovery = Vec4(6.00, 2.00, 15.0, 15.0).asDiagonal();   // K_recovery
  double k_dg = 0.50;
  double k_fbg = 8.00;
  double k_tau = 15.0;
  // Multiplies the reflected UAM force before it is mapped to joint torques.
  double force_reflection_scale = 0.6;
};

struct HapticSetpoint {
  Vec4 theta = Vec4::Zero();
  Vec4 rate = Vec4::Zero();
  double grip = 0.0;
  double grip_rate = 0.0;
};

/// Inner joint servo gains of the haptic arm and gripper.
struct ServoGains {
  double arm_kp = 50.0;
  double arm_kd = 5.0;
  double grip_kp = 5.0;
  double grip_kd = 0.5;
};

Vec3 position_control(const UamGains& gains, const Vec3& position, const Vec3& velocity,
                      const Vec3& position_d, const Vec3& velocity_d, const Vec3& force_hat_body,
                      const RotationMatrix& body_to_world);

struct ThrustAttitude {
  double thrust = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
};

inline constexpr double kMinThrust = 0.1;

/// Inverts the thrust model at the measured attitude. Throws DegenerateThrust
/// when the resulting thrust is below kMinThrust or an asin argument leaves [-1, 1].
ThrustAttitude extract_thrust_attitude(const Vec3& u_d, const EulerAngles& att);

/// Loop-safe variant: thrust floored at kMinThrust, asin arguments clamped to
/// [-1 + 1e-9, 1 - 1e-9], and roll/pitch limited to +-tilt_limit.
ThrustAttitude extract_thrust_attitude_saturated(const Vec3& u_d, const EulerAngles& att,
                                                 double tilt_limit = 0.5);

Vec3 attitude_rate_control(const UamGains& gains, const EulerAngles& att_d, const EulerAngles& att);

/// Semi-implicit Euler step of M_Hd a + D_Hd v = tau_ext_hat + tau_fb + J^T (s f_hat).
HapticSetpoint admittance_step(const AdmittanceGains& gains, const HapticSetpoint& setpoint,
                               const Vec4& tau_ext_hat, const Vec4& tau_fb, const Mat34& jacobian,
                               const Vec3& force_hat_body, double dt);

Vec4 recentering_torque(const Mat4& k_fb, const Vec4& theta, const Vec4& theta0);

struct GripperSetpoint {
  double angle;
  double rate;
};

GripperSetpoint gripper_compliance_step(const AdmittanceGains& gains, double angle_d,
                                        double rate_d, double angle, double angle0,
                                        double grip_torque, double dt);

/// PD + gravity compensation tracking of the admittance setpoint.
Vec4 arm_joint_servo(const ServoGains& gains, const Vec4& theta, const Vec4& rate,
                     const HapticSetpoint& setpoint, const Vec4& gravity);

double gripper_servo(const ServoGains& gains, double angle, double rate, double angle_d,
                     double rate_d);

}  // namespace plugpull::ctrl
