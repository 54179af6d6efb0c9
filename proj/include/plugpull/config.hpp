#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "plugpull/controllers.hpp"
#include "plugpull/plant.hpp"
#include "plugpull/spatial_math.hpp"
#include "plugpull/teleop.hpp"

namespace plugpull::sim {

enum class Mode { Baseline, Proposed };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct TimingParams {
  double physics_dt = 0.001;
  double control_dt = 0.002;
  double duration = 30.0;
  double telemetry_hz = 30.0;
};

struct UamParams {
  double mass = 2.5;       // true m_t
  double gravity = 9.81;   // true g
  Vec3 initial_position{0.0, 0.0, 1.0};
  double initial_yaw = 0.0;
  plant::UamArmGeometry arm;
  double joint_rate_limit = 4.0;   // [rad/s]
  double grip_close_angle = 0.5;   // onboard gripper counts as closed above this [rad]
  double tilt_limit = 0.5;         // desired roll/pitch clamp [rad]
};

struct DobParams {
  double nu = 0.90;
  // Used by the running observer; 0 falls back to nu.
  double nu_estimation = 0.20;
  Vec3 gain_zeta{1.0, 1.0, 1.0};
  Vec3 gain_chi{1.0, 1.0, 1.0};

  double effective_nu() const { return nu_estimation > 0.0 ? nu_estimation : nu; }
};

struct KfParams {
  double q = 100.0;
  double r = 0.01;
};

struct HapticParams {
  plant::HapticArmModel arm;
  double gripper_inertia = 0.01;
  Vec4 initial_theta = Vec4::Zero();
  double grip_min = 0.0;
  double grip_max = 1.0;
  Vec4 observer_gain{30.0, 30.0, 30.0, 30.0};  // K_I,H diagonal
  ctrl::ServoGains servo;
  ctrl::AdmittanceGains gains;
};

/// Scripted human. Forces are on the haptic handle, in the handle base frame.
struct OperatorParams {
  bool enabled = true;
  double start_delay = 0.5;          // [s]
  double reaction_time = 0.4;        // T_react [s]
  double hand_tau = 0.15;            // first-order hand lag [s]
  Vec3 pull_direction{-1.0, 0.0, 0.0};
  double pull_peak = 20.0;           // [N]
  double pull_rate = 1.8;            // ramp of the pull target [N/s]
  double approach_gain = 1.5;        // desired handle displacement per metre of error
  double approach_max_displacement = 0.08;  // [m]
  double hand_stiffness = 100.0;     // hand impedance while steering [N/m]
  double hand_damping = 15.0;        // [N s/m]
  double pull_line_stiffness = 300.0; // integral gain holding the handle on the pull line [N/(m s)]
  double approach_tolerance = 0.005; // [m]
  double approach_speed_tolerance = 0.01;  // [m/s]
  double approach_settle = 0.3;      // [s]
  std::vector<Vec3> approach_waypoints;    // world, visited before the socket
  double grip_torque = 0.4;          // [N m]
  double grip_ramp = 2.0;            // [s]
  double grasp_hold = 0.5;           // [s]
  double tremor_amplitude = 0.05;    // [N]
  double tremor_frequency = 9.0;     // [Hz]
};

/// Seeded per-run perturbations of the scenario.
struct VariationParams {
  double anchor_jitter = 0.01;       // uniform +- [m] per axis
  double pull_rate_jitter = 0.2;     // relative
  double pull_peak_jitter = 0.1;     // relative
  double pull_angle_jitter = 0.087;  // [rad] about z
};

struct LimitParams {
  double max_position = 100.0;  // |p_c| [m]
  double max_arm_rate = 100.0;  // |theta_dot_H| [rad/s]
};

struct ScenarioConfig {
  Mode mode = Mode::Proposed;
  std::uint64_t seed = 1;
  TimingParams timing;
  UamParams uam;
  ctrl::UamGains uam_gains;
  DobParams dob;
  KfParams kf;
  HapticParams haptic;
  teleop::TeleopParams teleop;
  plant::PlugParams plug;
  OperatorParams op;
  VariationParams variation;
  LimitParams limits;

  /// Throws ConfigError.
  void validate() const;
  int control_substeps() const;
  std::int64_t control_ticks() const;
};

/// Applies the seeded variations; deterministic in cfg.seed.
ScenarioConfig resolve_variations(const ScenarioConfig& cfg);

nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg);
/// Starts from defaults; unknown keys are rejected.
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);

}  // namespace plugpull::sim
