#include "plugpull/operator.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace plugpull::sim {

const char* to_string(OperatorPhase p) {
  switch (p) {
    case OperatorPhase::Approach: return "APPROACH";
    case OperatorPhase::Grasp: return "GRASP";
    case OperatorPhase::Pull: return "PULL";
    case OperatorPhase::React: return "REACT";
    case OperatorPhase::Idle: return "IDLE";
  }
  return "?";
}

OperatorState OperatorState::initial(const OperatorParams& params, std::uint64_t seed) {
  OperatorState s;
  s.phase = params.enabled ? OperatorPhase::Approach : OperatorPhase::Idle;
  // Separate stream from the scenario variations.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 d(n(rng), n(rng), n(rng));
  if (d.norm() > 1e-9) s.tremor_direction = d.normalized();
  s.tremor_phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  return s;
}

namespace {

Vec3 clamp_norm(const Vec3& v, double max) {
  const double n = v.norm();
  return n > max ? Vec3(v * (max / n)) : v;
}

void enter(OperatorState& s, OperatorPhase p, double t) {
  s.phase = p;
  s.phase_since = t;
  s.settled_since.reset();
}

}  // namespace

OperatorOutput operator_step(const OperatorParams& params, const OperatorState& op,
                             const OperatorObservation& obs, double t, double dt) {
  OperatorState s = op;
  const Mat3 world_to_handle = math::rot_z(obs.yaw).transpose();

  if (obs.separated && !s.separation_seen) s.separation_seen = t;

  // Phase transitions.
  const bool waypoint_pending = s.waypoint < params.approach_waypoints.size();
  const Vec3 goal = waypoint_pending ? params.approach_waypoints[s.waypoint] : obs.socket;
  const Vec3 error = goal - obs.ee_position;
  switch (s.phase) {
    case OperatorPhase::Approach:
      if (t < params.start_delay) break;
      if (waypoint_pending) {
        if (error.norm() < 3.0 * params.approach_tolerance) ++s.waypoint;
        break;
      }
      if (error.norm() < params.approach_tolerance &&
          obs.ee_velocity.norm() < params.approach_speed_tolerance) {
        if (!s.settled_since) s.settled_since = t;
        if (t - *s.settled_since >= params.approach_settle) enter(s, OperatorPhase::Grasp, t);
      } else {
        s.settled_since.reset();
      }
      break;
    case OperatorPhase::Grasp:
      if (obs.plug_held) {
        if (!s.settled_since) s.settled_since = t;
        if (t - *s.settled_since >= params.grasp_hold) enter(s, OperatorPhase::Pull, t);
      } else {
        s.settled_since.reset();
      }
      break;
    case OperatorPhase::Pull:
      if (s.separation_seen && t >= *s.separation_seen + params.reaction_time) {
        enter(s, OperatorPhase::React, t);
      }
      break;
    case OperatorPhase::React:
      if (t - s.phase_since >= 5.0 * params.hand_tau) enter(s, OperatorPhase::Idle, t);
      break;
    case OperatorPhase::Idle:
      break;
  }

  // Steering adds a spring around a desired handle displacement; pulling and
  // letting go are forces through the first-order hand. The hand damps the
  // handle whenever it holds it and keeps it on the pull line while pulling.
  Vec3 target = Vec3::Zero();
  Vec3 spring = Vec3::Zero();
  double grip_target = 0.0;
  const bool active = params.enabled && t >= params.start_delay;
  switch (s.phase) {
    case OperatorPhase::Approach:
    case OperatorPhase::Grasp: {
      if (!active) break;
      const Vec3 p_star = clamp_norm(params.approach_gain * (world_to_handle * error),
                                     params.approach_max_displacement);
      spring = params.hand_stiffness * (p_star - obs.handle_displacement);
      if (s.phase == OperatorPhase::Grasp) {
        const double ramp = params.grip_ramp > 0 ? (t - s.phase_since) / params.grip_ramp : 1.0;
        grip_target = params.grip_torque * std::min(ramp, 1.0);
      }
      break;
    }
    case OperatorPhase::Pull: {
      const double mag = std::min(params.pull_rate * (t - s.phase_since), params.pull_peak);
      target = mag * params.pull_direction;
      const Vec3 d = params.pull_direction.normalized();
      const Vec3 off = obs.handle_displacement - d * d.dot(obs.handle_displacement);
      s.hold_force -= dt * params.pull_line_stiffness * off;
      spring = s.hold_force;
      grip_target = params.grip_torque;
      break;
    }
    case OperatorPhase::React:
      grip_target = params.grip_torque;
      break;
    case OperatorPhase::Idle:
      break;
  }

  s.hand_force += (1.0 - std::exp(-dt / params.hand_tau)) * (target - s.hand_force);
  s.grip_torque = grip_target;

  OperatorOutput out;
  out.hand_force = s.hand_force;
  const bool on_handle = active && s.phase != OperatorPhase::Idle;
  if (on_handle) {
    out.hand_force += spring - params.hand_damping * obs.handle_velocity;
    if (params.tremor_amplitude > 0) {
      out.hand_force += params.tremor_amplitude *
                        std::sin(2.0 * std::numbers::pi * params.tremor_frequency * t + s.tremor_phase) *
                        s.tremor_direction;
    }
  }
  out.grip_torque = s.grip_torque;
  out.tau_external = obs.handle_jacobian.transpose() * out.hand_force;
  out.state = s;
  return out;
}

}  // namespace plugpull::sim
