#pragma once

#include <array>

#include "plugpull/spatial_math.hpp"

namespace plugpull::plant {

// ---------------------------------------------------------------------------
// Haptic arm
// ---------------------------------------------------------------------------

/// 4-joint haptic arm. Joint 1 yaws about the base z axis, joints 2-4 pitch
/// about their local y axes. Links 1-2 point up and links 3-4 point forward at
/// the home pose, so the chain is bent (non-singular) at theta = 0. Each link
/// carries a point mass at its tip; the gripper is an extra point mass at the
/// tool tip.
struct HapticArmModel {
  std::array<double, 4> link_length{0.10, 0.20, 0.20, 0.10};
  std::array<double, 4> link_mass{0.30, 0.25, 0.20, 0.15};
  double payload_mass = 0.10;
  // Reflected rotor inertia per joint, keeps M positive definite everywhere.
  double armature = 0.005;
  double gravity = 9.81;

  void validate() const;
};

struct HapticArmState {
  Vec4 theta = Vec4::Zero();
  Vec4 rate = Vec4::Zero();
};

struct ArmDynamics {
  Mat4 mass;      // M(theta)
  Mat4 coriolis;  // C(theta, theta_dot), Christoffel form
  Vec4 gravity;   // G(theta) = dU/dtheta
};

struct ArmKinematics {
  Vec3 tip;       // tool tip in the arm base frame [m]
  Mat34 jacobian; // d tip / d theta
};

ArmDynamics arm_dynamics(const HapticArmModel& model, const HapticArmState& state);
Mat4 arm_mass_matrix(const HapticArmModel& model, const Vec4& theta);
double arm_potential_energy(const HapticArmModel& model, const Vec4& theta);
Vec4 arm_accel(const HapticArmModel& model, const HapticArmState& state, const Vec4& tau_joint,
               const Vec4& tau_external);
ArmKinematics arm_fk(const HapticArmModel& model, const Vec4& theta);

// ---------------------------------------------------------------------------
// Haptic gripper
// ---------------------------------------------------------------------------

struct GripperState {
  double theta = 0.0;
  double rate = 0.0;
  double inertia = 0.01;  // J_g [kg m^2]
};

double gripper_accel(const GripperState& state, double torque);

// ---------------------------------------------------------------------------
// Aerial manipulator
// ---------------------------------------------------------------------------

struct UamState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  EulerAngles attitude;
  Vec3 joints = Vec3::Zero();  // onboard arm: roll joint, pitch joint, gripper
  double mass = 2.5;
  double gravity = 9.81;
};

/// Onboard arm geometry. The tool sits at mount + R_x(q1) R_y(q2) (reach, 0, 0)
/// in the body frame, so q = (-roll, -pitch) keeps the tool frame level.
struct UamArmGeometry {
  Vec3 mount{0.10, 0.0, -0.10};
  double reach = 0.25;
};

/// Applied thrust vector u_c = F * Psi(yaw) * [c1 s2; s1; c1 c2].
Vec3 thrust_vector(double thrust, const EulerAngles& att);

/// Translational acceleration; external_force_body is the end-effector force
/// in the body frame and enters through R_b.
Vec3 uam_accel(const UamState& state, double thrust, const Vec3& external_force_body);

/// Moves `current` toward `target` by at most rate_limit * dt per component.
Vec3 rate_limited_approach(const Vec3& current, const Vec3& target, double rate_limit, double dt);

/// Euler step of the attitude kinematics plus rate-limited onboard joint servo.
UamState attitude_joint_servo(const UamState& state, const Vec3& omega_d, const Vec3& joints_d,
                              double dt, double joint_rate_limit = 4.0);

Vec3 uam_end_effector(const UamState& state, const UamArmGeometry& geom);

// ---------------------------------------------------------------------------
// Plug / socket interaction
// ---------------------------------------------------------------------------

enum class AttachState { Free, Grasped, Extracted };

const char* to_string(AttachState s);

struct PlugParams {
  Vec3 anchor{0.65, 0.0, 0.90};      // socket point, world [m]
  Vec3 wedge_axis{-1.0, 0.0, 0.0};   // extraction direction, unit
  double stiffness = 2000.0;         // K_s [N/m]
  double damping = 20.0;             // D_s [N s/m]
  double break_force = 15.0;         // F_break [N]
  double release_tau = 0.01;         // [s]
  double capture_radius = 0.05;      // [m]

  void validate() const;
};

struct PlugAttachment {
  AttachState state = AttachState::Free;
  PlugParams params;
  // Offset of the grasp point from the anchor, frozen at capture so the
  // spring starts unloaded.
  Vec3 grip_offset = Vec3::Zero();
  double release_time = 0.0;
  Vec3 release_force = Vec3::Zero();  // world force at the breakaway instant
};

/// Spring axial tension (positive when the plug is being pulled out).
double plug_tension(const PlugAttachment& attach, const Vec3& ee_world);

/// Force on the end effector in the world frame for a frozen attachment state.
Vec3 plug_force_world(const PlugAttachment& attach, const Vec3& ee_world, const Vec3& ee_vel_world,
                      double t);

/// Applies FREE->GRASPED and GRASPED->EXTRACTED transitions.
PlugAttachment plug_transition(const PlugAttachment& attach, const Vec3& ee_world,
                               const Vec3& ee_vel_world, bool grip_closed, double t);

struct PlugForce {
  Vec3 force_body;
  PlugAttachment attachment;
};

/// Transition, then evaluate the force and express it in the body frame.
PlugForce plug_force(const PlugAttachment& attach, const Vec3& ee_world, const Vec3& ee_vel_world,
                     bool grip_closed, double t, const RotationMatrix& body_to_world);

}  // namespace plugpull::plant
