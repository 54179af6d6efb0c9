#pragma once

#include <optional>

#include "plugpull/minsnap.hpp"
#include "plugpull/spatial_math.hpp"

namespace plugpull::teleop {

struct TeleopParams {
  Vec3 v_max{0.4, 0.4, 0.4};       // [m/s]
  Vec3 handle_range{0.2, 0.2, 0.2}; // p_H,max [m]
  double fdot_threshold = 7.50;    // [N/s]
  double recovery_duration = 5.0;  // T_e [s]
  // Arming guards in front of the threshold test. Disable for the bare rule.
  bool arming_guards = true;
  double arm_force = 3.0;          // [N]
  double arm_debounce = 0.1;       // [s]

  void validate() const;
};

enum class Phase { Nominal, Recovery };

const char* to_string(Phase p);

struct PhaseState {
  Phase phase = Phase::Nominal;
  double t_e = 0.0;
  Vec3 p_e = Vec3::Zero();
  Vec3 v_e = Vec3::Zero();
  double frozen_grip = 0.0;
  bool armed = false;
  std::optional<double> arm_since;
  std::optional<RecoveryTrajectory> trajectory;
};

/// Body-frame velocity command from the handle displacement, saturated by tanh.
Vec3 velocity_mapping(const TeleopParams& params, const Vec3& handle_displacement);

struct ReferenceState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();  // world frame
};

/// Rotates the body command by yaw and advances the position by the trapezoid rule.
ReferenceState integrate_reference(const ReferenceState& ref, const Vec3& velocity_body,
                                   double yaw, double dt);

/// Onboard arm joint targets that keep the tool level and copy the haptic grip.
Vec3 desired_joint_angles(const EulerAngles& att, double grip);

/// Updates the arming latch: gripper closed and |f_hat| above arm_force for the
/// whole debounce window.
PhaseState update_arming(const TeleopParams& params, const PhaseState& phase,
                         const Vec3& force_hat, bool grip_closed, double t);

/// Threshold test on |f_hat_dot|. Always false outside NOMINAL.
bool detect_extraction(const TeleopParams& params, const PhaseState& phase, const Vec3& force_rate);

/// NOMINAL -> RECOVERY on detection (snapshots state, solves the recovery
/// trajectory); RECOVERY -> NOMINAL once the window has elapsed.
PhaseState phase_step(const TeleopParams& params, const PhaseState& phase, bool detection, double t,
                      const Vec3& position, const Vec3& velocity, double grip);

Vec4 haptic_recovery_rate(const Mat4& k_recovery, const Vec4& theta, const Vec4& theta0);

}  // namespace plugpull::teleop
