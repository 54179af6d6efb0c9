#pragma once

#include <cstdint>
#include <functional>

#include "plugpull/config.hpp"
#include "plugpull/controllers.hpp"
#include "plugpull/estimators.hpp"
#include "plugpull/operator.hpp"
#include "plugpull/plant.hpp"
#include "plugpull/simlog.hpp"
#include "plugpull/teleop.hpp"

namespace plugpull::sim {

/// Outputs of the last control tick, held constant until the next one.
struct HeldInputs {
  double thrust = 0.0;
  Vec3 omega_d = Vec3::Zero();
  Vec3 joints_d = Vec3::Zero();
  Vec3 hand_force = Vec3::Zero();  // handle base frame
  double grip_torque = 0.0;
  ctrl::HapticSetpoint setpoint;
};

struct SimState {
  std::int64_t tick = 0;
  double t = 0.0;

  // Plant.
  plant::HapticArmState arm;
  plant::GripperState gripper;
  plant::UamState uam;
  plant::PlugAttachment plug;

  // Controller side.
  est::DobState dob;
  est::MomentumObserverState observer;
  est::ForceDerivativeKf kf;
  teleop::PhaseState phase;
  teleop::ReferenceState reference;
  OperatorState op;
  HeldInputs held;
  Vec3 force_hat = Vec3::Zero();   // world
  Vec3 force_rate = Vec3::Zero();  // world
  Vec4 tau_ext_hat = Vec4::Zero();
  double yaw_setpoint = 0.0;
};

/// Inputs that replace the scripted operator in live mode.
struct ExternalOperatorInput {
  Vec3 hand_force = Vec3::Zero();
  double grip_torque = 0.0;
};

enum class OperatorSource { Scripted, External };

class Simulator {
 public:
  /// Validates cfg and applies its seeded variations.
  explicit Simulator(const ScenarioConfig& cfg, OperatorSource source = OperatorSource::Scripted);

  /// Back to the initial state (t = 0).
  void reset();

  /// Runs one control tick at t, then integrates the plant over one control
  /// period. Returns the row sampled at t.
  LogRow step();

  /// Steps until the configured duration has elapsed.
  SimLog run();

  bool finished() const { return state_.tick >= cfg_.control_ticks(); }
  double time() const { return state_.t; }
  const SimState& state() const { return state_; }
  const ScenarioConfig& config() const { return cfg_; }

  /// Live inputs; only read at the next control tick.
  void set_external_input(const ExternalOperatorInput& in) { external_ = in; }
  void set_yaw_setpoint(double yaw) { state_.yaw_setpoint = yaw; }

  /// Called after every physics sub-step (tests).
  void set_substep_hook(std::function<void(const SimState&)> hook) { hook_ = std::move(hook); }

  Vec3 handle_home() const { return handle_home_; }
  Vec3 end_effector() const;

 private:
  LogRow control_tick();
  void physics_step(double t, double h);

  ScenarioConfig cfg_;
  OperatorSource source_;
  SimState state_;
  ExternalOperatorInput external_;
  Vec3 handle_home_ = Vec3::Zero();
  std::function<void(const SimState&)> hook_;
};

/// Convenience: Simulator(cfg).run().
SimLog run_scenario(const ScenarioConfig& cfg);

}  // namespace plugpull::sim
