#pragma once

#include <cstdint>
#include <optional>

#include "plugpull/config.hpp"
#include "plugpull/spatial_math.hpp"

namespace plugpull::sim {

enum class OperatorPhase { Approach, Grasp, Pull, React, Idle };

const char* to_string(OperatorPhase p);

struct OperatorState {
  OperatorPhase phase = OperatorPhase::Idle;
  double phase_since = 0.0;
  std::size_t waypoint = 0;
  std::optional<double> settled_since;
  std::optional<double> separation_seen;  // perception timestamp
  Vec3 hand_force = Vec3::Zero();         // actual hand force on the handle [N]
  Vec3 hold_force = Vec3::Zero();         // slow correction keeping the pull line [N]
  double grip_torque = 0.0;               // [N m]
  Vec3 tremor_direction = Vec3::UnitZ();
  double tremor_phase = 0.0;

  /// Approach (or Idle when disabled); tremor direction drawn from the seed.
  static OperatorState initial(const OperatorParams& params, std::uint64_t seed);
};

/// What the human sees and feels.
struct OperatorObservation {
  Vec3 ee_position = Vec3::Zero();  // world
  Vec3 ee_velocity = Vec3::Zero();  // world
  double yaw = 0.0;
  Vec3 socket = Vec3::Zero();
  bool plug_held = false;           // plug visibly in the gripper
  bool separated = false;           // plug visibly out of the socket
  Vec3 handle_displacement = Vec3::Zero();  // p_H, handle base frame
  Vec3 handle_velocity = Vec3::Zero();
  Mat34 handle_jacobian = Mat34::Zero();
};

struct OperatorOutput {
  OperatorState state;
  Vec4 tau_external;   // J^T hand_force at the observed pose
  Vec3 hand_force;     // handle base frame, tremor included [N]
  double grip_torque;  // [N m]
};

OperatorOutput operator_step(const OperatorParams& params, const OperatorState& op,
                             const OperatorObservation& obs, double t, double dt);

}  // namespace plugpull::sim
