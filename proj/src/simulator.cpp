#include "plugpull/simulator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "plugpull/errors.hpp"
#include "plugpull/rk4.hpp"

namespace plugpull::sim {

namespace {

// theta_H(4), rate_H(4), theta_g, rate_g, p(3), v(3), phi(3)
using Continuous = Eigen::Matrix<double, 19, 1>;

Continuous pack(const SimState& s) {
  Continuous x;
  x.segment<4>(0) = s.arm.theta;
  x.segment<4>(4) = s.arm.rate;
  x[8] = s.gripper.theta;
  x[9] = s.gripper.rate;
  x.segment<3>(10) = s.uam.position;
  x.segment<3>(13) = s.uam.velocity;
  x.segment<3>(16) = s.uam.attitude.vec();
  return x;
}

void unpack(const Continuous& x, SimState& s) {
  s.arm.theta = x.segment<4>(0);
  s.arm.rate = x.segment<4>(4);
  s.gripper.theta = x[8];
  s.gripper.rate = x[9];
  s.uam.position = x.segment<3>(10);
  s.uam.velocity = x.segment<3>(13);
  s.uam.attitude = EulerAngles::from(x.segment<3>(16));
}

// End-effector velocity from body translation and rotation (joint motion neglected).
Vec3 ee_velocity(const plant::UamState& u, const plant::UamArmGeometry& geom, const Vec3& omega) {
  const RotationMatrix r = math::rot_body(u.attitude);
  const Vec3 lever = math::rot_body(u.attitude).transpose() * (plant::uam_end_effector(u, geom) - u.position);
  return u.velocity + r * omega.cross(lever);
}

}  // namespace

Simulator::Simulator(const ScenarioConfig& cfg, OperatorSource source) : source_(source) {
  cfg.validate();
  cfg_ = resolve_variations(cfg);
  cfg_.validate();
  reset();
}

void Simulator::reset() {
  const auto& c = cfg_;
  SimState s;
  s.arm.theta = c.haptic.initial_theta;
  s.gripper.inertia = c.haptic.gripper_inertia;
  s.gripper.theta = c.haptic.grip_min;

  s.uam.position = c.uam.initial_position;
  s.uam.attitude.yaw = c.uam.initial_yaw;
  s.uam.mass = c.uam.mass;
  s.uam.gravity = c.uam.gravity;
  s.uam.joints = teleop::desired_joint_angles(s.uam.attitude, s.gripper.theta);

  s.plug.params = c.plug;

  s.dob = est::DobState::initial(s.uam.velocity, c.dob.effective_nu(), c.uam_gains.mass_hat,
                                 c.uam_gains.g_hat, c.dob.gain_zeta.asDiagonal(),
                                 c.dob.gain_chi.asDiagonal());
  s.observer = est::MomentumObserverState::initial(
      c.haptic.observer_gain.asDiagonal(), plant::arm_mass_matrix(c.haptic.arm, s.arm.theta),
      s.arm.rate);
  s.kf = est::ForceDerivativeKf(c.kf.q, c.kf.r);
  s.reference.position = s.uam.position;
  s.op = OperatorState::initial(c.op, c.seed);
  s.yaw_setpoint = c.uam.initial_yaw;

  s.held.thrust = c.uam_gains.mass_hat * c.uam_gains.g_hat;
  s.held.joints_d = s.uam.joints;
  s.held.setpoint.theta = s.arm.theta;
  s.held.setpoint.grip = s.gripper.theta;

  state_ = s;
  external_ = {};
  handle_home_ = plant::arm_fk(c.haptic.arm, c.haptic.initial_theta).tip;
}

Vec3 Simulator::end_effector() const { return plant::uam_end_effector(state_.uam, cfg_.uam.arm); }

LogRow Simulator::step() {
  const LogRow row = control_tick();
  const int n = cfg_.control_substeps();
  const double h = cfg_.timing.physics_dt;
  for (int j = 0; j < n; ++j) physics_step(state_.t + j * h, h);
  ++state_.tick;
  state_.t = static_cast<double>(state_.tick) * cfg_.timing.control_dt;
  return row;
}

SimLog Simulator::run() {
  SimLog log;
  log.rows.reserve(static_cast<std::size_t>(cfg_.control_ticks() - state_.tick));
  while (!finished()) log.rows.push_back(step());
  return log;
}

LogRow Simulator::control_tick() {
  const auto& c = cfg_;
  SimState& s = state_;
  const double t = s.t;
  const double dt = c.timing.control_dt;
  const bool proposed = c.mode == Mode::Proposed;
  const RotationMatrix r_b = math::rot_body(s.uam.attitude);

  // Estimation.
  const Vec3 u_applied = plant::thrust_vector(s.held.thrust, s.uam.attitude);
  const est::DobOutput dob = est::dob_step(s.dob, s.uam.velocity, u_applied, dt);
  s.dob = dob.state;
  s.force_hat = dob.force;
  const Vec3 force_hat_body = r_b.transpose() * s.force_hat;

  const est::KfOutput kf = est::kf_derivative_step(s.kf, s.force_hat, dt);
  s.kf = kf.state;
  s.force_rate = kf.rate;

  const plant::ArmDynamics dyn = plant::arm_dynamics(c.haptic.arm, s.arm);
  const Vec4 tau_servo =
      ctrl::arm_joint_servo(c.haptic.servo, s.arm.theta, s.arm.rate, s.held.setpoint, dyn.gravity);
  const est::MomentumObserverOutput mo =
      est::momentum_observer_step(s.observer, dyn, s.arm.rate, tau_servo, dt);
  s.observer = mo.state;
  s.tau_ext_hat = mo.torque;

  // Operator.
  const plant::ArmKinematics fk = plant::arm_fk(c.haptic.arm, s.arm.theta);
  const Vec3 ee = plant::uam_end_effector(s.uam, c.uam.arm);
  if (source_ == OperatorSource::Scripted) {
    OperatorObservation obs;
    obs.ee_position = ee;
    obs.ee_velocity = ee_velocity(s.uam, c.uam.arm, s.held.omega_d);
    obs.yaw = s.uam.attitude.yaw;
    obs.socket = s.plug.params.anchor;
    obs.plug_held = s.plug.state == plant::AttachState::Grasped;
    obs.separated = s.plug.state == plant::AttachState::Extracted;
    obs.handle_displacement = fk.tip - handle_home_;
    obs.handle_velocity = fk.jacobian * s.arm.rate;
    obs.handle_jacobian = fk.jacobian;
    const OperatorOutput op = operator_step(c.op, s.op, obs, t, dt);
    s.op = op.state;
    s.held.hand_force = op.hand_force;
    s.held.grip_torque = op.grip_torque;
  } else {
    s.held.hand_force = external_.hand_force;
    s.held.grip_torque = external_.grip_torque;
  }

  // Phase logic.
  if (proposed) {
    const bool grip_closed = s.uam.joints[2] >= c.uam.grip_close_angle;
    s.phase = teleop::update_arming(c.teleop, s.phase, s.force_hat, grip_closed, t);
    const bool detection = teleop::detect_extraction(c.teleop, s.phase, s.force_rate);
    const teleop::Phase before = s.phase.phase;
    s.phase = teleop::phase_step(c.teleop, s.phase, detection, t, s.uam.position,
                                 s.uam.velocity, s.gripper.theta);
    if (before == teleop::Phase::Recovery && s.phase.phase == teleop::Phase::Nominal) {
      s.reference.position = s.uam.position;
      s.reference.velocity.setZero();
      s.held.setpoint.rate.setZero();
    }
  }
  const bool recovery = s.phase.phase == teleop::Phase::Recovery;

  // Haptic setpoints.
  ctrl::HapticSetpoint sp = s.held.setpoint;
  const ctrl::GripperSetpoint g =
      ctrl::gripper_compliance_step(c.haptic.gains, sp.grip, sp.grip_rate, s.gripper.theta,
                                    c.haptic.grip_min, s.held.grip_torque, dt);
  sp.grip = std::clamp(g.angle, c.haptic.grip_min, c.haptic.grip_max);
  sp.grip_rate = sp.grip == g.angle ? g.rate : 0.0;
  if (!recovery) {
    const Vec4 tau_fb =
        ctrl::recentering_torque(c.haptic.gains.recenter, s.arm.theta, c.haptic.initial_theta);
    const ctrl::HapticSetpoint a = ctrl::admittance_step(c.haptic.gains, sp, s.tau_ext_hat, tau_fb,
                                                         fk.jacobian, force_hat_body, dt);
    sp.theta = a.theta;
    sp.rate = a.rate;
  } else {
    sp.rate = teleop::haptic_recovery_rate(c.haptic.gains.recovery, s.arm.theta,
                                           c.haptic.initial_theta);
    sp.theta += dt * sp.rate;
  }
  s.held.setpoint = sp;

  // UAM reference.
  const Vec3 p_h = fk.tip - handle_home_;
  if (recovery) {
    const teleop::TrajectorySample ref = teleop::minsnap_eval(*s.phase.trajectory, t);
    s.reference = {ref.position, ref.velocity};
  }
  const Vec3 pcd = s.reference.position;
  const Vec3 vcd = s.reference.velocity;
  if (!recovery) {
    s.reference = teleop::integrate_reference(
        s.reference, teleop::velocity_mapping(c.teleop, p_h), s.uam.attitude.yaw, dt);
  }

  // UAM control.
  const double grip = recovery ? s.phase.frozen_grip : s.gripper.theta;
  s.held.joints_d = teleop::desired_joint_angles(s.uam.attitude, grip);
  const Vec3 u_d = ctrl::position_control(c.uam_gains, s.uam.position, s.uam.velocity, pcd, vcd,
                                          force_hat_body, r_b);
  const ctrl::ThrustAttitude ta =
      ctrl::extract_thrust_attitude_saturated(u_d, s.uam.attitude, c.uam.tilt_limit);
  EulerAngles att_d;
  att_d.roll = ta.roll;
  att_d.pitch = ta.pitch;
  att_d.yaw = s.yaw_setpoint;
  s.held.thrust = ta.thrust;
  s.held.omega_d = ctrl::attitude_rate_control(c.uam_gains, att_d, s.uam.attitude);

  LogRow row;
  row.t = t;
  row.pc = s.uam.position;
  row.pcd = pcd;
  row.vc = s.uam.velocity;
  row.vcd = vcd;
  row.phi = s.uam.attitude.vec();
  row.theta_h = s.arm.theta;
  row.theta_hd = sp.theta;
  row.p_h = p_h;
  row.theta_g = s.gripper.theta;
  row.fhat = s.force_hat;
  row.fdot_norm = s.force_rate.norm();
  row.ftrue = plant::plug_force_world(s.plug, ee, ee_velocity(s.uam, c.uam.arm, s.held.omega_d), t);
  row.phase = s.phase.phase;
  row.attach = s.plug.state;
  return row;
}

void Simulator::physics_step(double t, double h) {
  const auto& c = cfg_;
  SimState& s = state_;
  const HeldInputs& in = s.held;
  const plant::PlugAttachment plug = s.plug;
  const Vec3 joints = s.uam.joints;

  auto deriv = [&](const Continuous& x, double tt) {
    Continuous dx;
    plant::HapticArmState arm{x.segment<4>(0), x.segment<4>(4)};
    const plant::ArmDynamics dyn = plant::arm_dynamics(c.haptic.arm, arm);
    const Vec4 tau = ctrl::arm_joint_servo(c.haptic.servo, arm.theta, arm.rate, in.setpoint,
                                           dyn.gravity);
    const Vec4 tau_ext =
        plant::arm_fk(c.haptic.arm, arm.theta).jacobian.transpose() * in.hand_force;
    dx.segment<4>(0) = arm.rate;
    dx.segment<4>(4) =
        dyn.mass.llt().solve(tau + tau_ext - dyn.coriolis * arm.rate - dyn.gravity);

    const double grip_tau = ctrl::gripper_servo(c.haptic.servo, x[8], x[9], in.setpoint.grip,
                                                in.setpoint.grip_rate) +
                            in.grip_torque;
    dx[8] = x[9];
    dx[9] = grip_tau / c.haptic.gripper_inertia;

    plant::UamState u;
    u.position = x.segment<3>(10);
    u.velocity = x.segment<3>(13);
    u.attitude = EulerAngles::from(x.segment<3>(16));
    u.joints = joints;
    u.mass = c.uam.mass;
    u.gravity = c.uam.gravity;
    const Vec3 ee = plant::uam_end_effector(u, c.uam.arm);
    const Vec3 f_world = plant::plug_force_world(plug, ee, ee_velocity(u, c.uam.arm, in.omega_d), tt);
    const Vec3 f_body = math::rot_body(u.attitude).transpose() * f_world;
    dx.segment<3>(10) = u.velocity;
    dx.segment<3>(13) = plant::uam_accel(u, in.thrust, f_body);
    dx.segment<3>(16) = math::euler_rates(u.attitude, in.omega_d);
    return dx;
  };

  const Continuous x = rk4_step(deriv, pack(s), t, h);
  unpack(x, s);

  // Gripper hard stops.
  if (s.gripper.theta < c.haptic.grip_min) {
    s.gripper.theta = c.haptic.grip_min;
    s.gripper.rate = std::max(s.gripper.rate, 0.0);
  } else if (s.gripper.theta > c.haptic.grip_max) {
    s.gripper.theta = c.haptic.grip_max;
    s.gripper.rate = std::min(s.gripper.rate, 0.0);
  }

  s.uam.joints = plant::rate_limited_approach(s.uam.joints, in.joints_d, c.uam.joint_rate_limit, h);

  const Vec3 ee = plant::uam_end_effector(s.uam, c.uam.arm);
  const bool grip_closed = s.uam.joints[2] >= c.uam.grip_close_angle;
  s.plug = plant::plug_transition(s.plug, ee, ee_velocity(s.uam, c.uam.arm, in.omega_d),
                                  grip_closed, t + h);

  if (!x.allFinite() || s.uam.position.norm() > c.limits.max_position ||
      s.arm.rate.norm() > c.limits.max_arm_rate) {
    throw NumericalDivergence("state left the sanity envelope at t = " + std::to_string(t + h) +
                              " s");
  }
  if (hook_) hook_(s);
}

SimLog run_scenario(const ScenarioConfig& cfg) { return Simulator(cfg).run(); }

}  // namespace plugpull::sim
