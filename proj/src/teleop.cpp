#include "plugpull/teleop.hpp"

#include <cmath>

#include "plugpull/errors.hpp"

namespace plugpull::teleop {

void TeleopParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(v_max[i] > 0) || !(handle_range[i] > 0)) {
      throw ConfigError("teleop: v_max and handle_range must be positive");
    }
  }
  if (!(fdot_threshold > 0) || !(recovery_duration >= kMinRecoveryWindow) || !(arm_force > 0) ||
      !(arm_debounce >= 0)) {
    throw ConfigError("teleop: threshold, recovery duration and arming parameters must be positive");
  }
}

const char* to_string(Phase p) { return p == Phase::Nominal ? "NOMINAL" : "RECOVERY"; }

Vec3 velocity_mapping(const TeleopParams& params, const Vec3& handle_displacement) {
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    v[i] = params.v_max[i] * std::tanh(handle_displacement[i] / params.handle_range[i]);
  }
  return v;
}

ReferenceState integrate_reference(const ReferenceState& ref, const Vec3& velocity_body,
                                   double yaw, double dt) {
  ReferenceState next;
  next.velocity = math::rot_z(yaw) * velocity_body;
  next.position = ref.position + 0.5 * dt * (ref.velocity + next.velocity);
  return next;
}

Vec3 desired_joint_angles(const EulerAngles& att, double grip) {
  return {-att.roll, -att.pitch, grip};
}

PhaseState update_arming(const TeleopParams& params, const PhaseState& phase,
                         const Vec3& force_hat, bool grip_closed, double t) {
  PhaseState next = phase;
  if (grip_closed && force_hat.norm() > params.arm_force) {
    if (!next.arm_since) next.arm_since = t;
    next.armed = (t - *next.arm_since) >= params.arm_debounce - 1e-12;
  } else {
    next.arm_since.reset();
    next.armed = false;
  }
  return next;
}

bool detect_extraction(const TeleopParams& params, const PhaseState& phase, const Vec3& force_rate) {
  if (phase.phase != Phase::Nominal) return false;
  if (params.arming_guards && !phase.armed) return false;
  return force_rate.norm() >= params.fdot_threshold;
}

PhaseState phase_step(const TeleopParams& params, const PhaseState& phase, bool detection, double t,
                      const Vec3& position, const Vec3& velocity, double grip) {
  PhaseState next = phase;
  if (phase.phase == Phase::Nominal) {
    if (detection) {
      next.phase = Phase::Recovery;
      next.t_e = t;
      next.p_e = position;
      next.v_e = velocity;
      next.frozen_grip = grip;
      next.armed = false;
      next.arm_since.reset();
      next.trajectory = minsnap_solve(position, velocity, t, params.recovery_duration);
    }
  } else if (t >= phase.t_e + params.recovery_duration - 1e-9) {
    next.phase = Phase::Nominal;
    next.trajectory.reset();
  }
  return next;
}

Vec4 haptic_recovery_rate(const Mat4& k_recovery, const Vec4& theta, const Vec4& theta0) {
  return -k_recovery * (theta - theta0);
}

}  // namespace plugpull::teleop
