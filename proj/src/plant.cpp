#include "plugpull/plant.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "plugpull/errors.hpp"

namespace plugpull::plant {

namespace {

// Joint axes/origins and the four point-mass positions for one configuration.
// Point mass i rides on link i, i.e. it moves with joints 0..i.
struct Chain {
  std::array<Vec3, 4> axis;
  std::array<Vec3, 4> origin;
  std::array<Vec3, 4> point;
  std::array<double, 4> mass;
};

Chain build_chain(const HapticArmModel& m, const Vec4& q) {
  Chain c;
  const Vec3 up = Vec3::UnitZ();
  const Vec3 fwd = Vec3::UnitX();

  RotationMatrix r = math::rot_z(q[0]);
  c.axis[0] = up;
  c.origin[0] = Vec3::Zero();
  c.origin[1] = r * (m.link_length[0] * up);

  c.axis[1] = r * Vec3::UnitY();
  r = r * math::rot_y(q[1]);
  c.origin[2] = c.origin[1] + r * (m.link_length[1] * up);

  c.axis[2] = c.axis[1];
  r = r * math::rot_y(q[2]);
  c.origin[3] = c.origin[2] + r * (m.link_length[2] * fwd);

  c.axis[3] = c.axis[1];
  r = r * math::rot_y(q[3]);
  const Vec3 tip = c.origin[3] + r * (m.link_length[3] * fwd);

  c.point = {c.origin[1], c.origin[2], c.origin[3], tip};
  c.mass = {m.link_mass[0], m.link_mass[1], m.link_mass[2], m.link_mass[3] + m.payload_mass};
  return c;
}

Mat34 point_jacobian(const Chain& c, int i) {
  Mat34 j = Mat34::Zero();
  for (int k = 0; k <= i; ++k) j.col(k) = c.axis[k].cross(c.point[i] - c.origin[k]);
  return j;
}

// d J_i / d q_l for revolute joints.
Mat34 point_jacobian_derivative(const Chain& c, const Mat34& j, int i, int l) {
  Mat34 dj = Mat34::Zero();
  if (l > i) return dj;
  for (int k = 0; k <= i; ++k) {
    if (l <= k) {
      dj.col(k) = c.axis[l].cross(j.col(k));
    } else {
      dj.col(k) = c.axis[k].cross(c.axis[l].cross(c.point[i] - c.origin[l]));
    }
  }
  return dj;
}

}  // namespace

void HapticArmModel::validate() const {
  for (int i = 0; i < 4; ++i) {
    if (!(link_length[i] > 0.0) || !(link_mass[i] > 0.0)) {
      throw ConfigError("haptic arm: link lengths and masses must be positive");
    }
  }
  if (!(payload_mass > 0.0) || armature < 0.0 || !(gravity >= 0.0)) {
    throw ConfigError("haptic arm: invalid payload/armature/gravity");
  }
}

Mat4 arm_mass_matrix(const HapticArmModel& model, const Vec4& theta) {
  const Chain c = build_chain(model, theta);
  Mat4 m = model.armature * Mat4::Identity();
  for (int i = 0; i < 4; ++i) {
    const Mat34 j = point_jacobian(c, i);
    m.noalias() += c.mass[i] * j.transpose() * j;
  }
  return m;
}

double arm_potential_energy(const HapticArmModel& model, const Vec4& theta) {
  const Chain c = build_chain(model, theta);
  double u = 0.0;
  for (int i = 0; i < 4; ++i) u += c.mass[i] * model.gravity * c.point[i].z();
  return u;
}

ArmDynamics arm_dynamics(const HapticArmModel& model, const HapticArmState& state) {
  const Chain c = build_chain(model, state.theta);
  ArmDynamics out;
  out.mass = model.armature * Mat4::Identity();
  out.gravity.setZero();

  std::array<Mat4, 4> dm;
  for (auto& d : dm) d.setZero();

  for (int i = 0; i < 4; ++i) {
    const Mat34 j = point_jacobian(c, i);
    out.mass.noalias() += c.mass[i] * j.transpose() * j;
    out.gravity.noalias() += c.mass[i] * model.gravity * j.row(2).transpose();
    for (int l = 0; l <= i; ++l) {
      const Mat34 dj = point_jacobian_derivative(c, j, i, l);
      const Mat4 t = dj.transpose() * j;
      dm[l].noalias() += c.mass[i] * (t + t.transpose());
    }
  }

  // C_kj = sum_i 1/2 (dM_kj/dq_i + dM_ki/dq_j - dM_ij/dq_k) qdot_i
  out.coriolis.setZero();
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) {
        s += 0.5 * (dm[i](k, j) + dm[j](k, i) - dm[k](i, j)) * state.rate[i];
      }
      out.coriolis(k, j) = s;
    }
  }
  return out;
}

Vec4 arm_accel(const HapticArmModel& model, const HapticArmState& state, const Vec4& tau_joint,
               const Vec4& tau_external) {
  const ArmDynamics d = arm_dynamics(model, state);
  const Vec4 net = tau_joint + tau_external - d.coriolis * state.rate - d.gravity;
  return d.mass.llt().solve(net);
}

ArmKinematics arm_fk(const HapticArmModel& model, const Vec4& theta) {
  const Chain c = build_chain(model, theta);
  return {c.point[3], point_jacobian(c, 3)};
}

double gripper_accel(const GripperState& state, double torque) { return torque / state.inertia; }

Vec3 thrust_vector(double thrust, const EulerAngles& att) {
  const double c1 = std::cos(att.roll), s1 = std::sin(att.roll);
  const double c2 = std::cos(att.pitch), s2 = std::sin(att.pitch);
  return thrust * math::psi_matrix(att.yaw) * Vec3(c1 * s2, s1, c1 * c2);
}

Vec3 uam_accel(const UamState& state, double thrust, const Vec3& external_force_body) {
  const Vec3 u = thrust_vector(thrust, state.attitude);
  const Vec3 f_world = math::rot_body(state.attitude) * external_force_body;
  return -state.gravity * Vec3::UnitZ() + (u + f_world) / state.mass;
}

Vec3 rate_limited_approach(const Vec3& current, const Vec3& target, double rate_limit, double dt) {
  const double max_step = rate_limit * dt;
  Vec3 out = current;
  for (int i = 0; i < 3; ++i) out[i] += std::clamp(target[i] - current[i], -max_step, max_step);
  return out;
}

UamState attitude_joint_servo(const UamState& state, const Vec3& omega_d, const Vec3& joints_d,
                              double dt, double joint_rate_limit) {
  UamState next = state;
  const Vec3 att_rate = math::euler_rates(state.attitude, omega_d);
  next.attitude = EulerAngles::from(state.attitude.vec() + dt * att_rate);
  next.joints = rate_limited_approach(state.joints, joints_d, joint_rate_limit, dt);
  return next;
}

Vec3 uam_end_effector(const UamState& state, const UamArmGeometry& geom) {
  const Vec3 tool = geom.mount + math::rot_x(state.joints[0]) * math::rot_y(state.joints[1]) *
                                     Vec3(geom.reach, 0.0, 0.0);
  return state.position + math::rot_body(state.attitude) * tool;
}

const char* to_string(AttachState s) {
  switch (s) {
    case AttachState::Free: return "FREE";
    case AttachState::Grasped: return "GRASPED";
    case AttachState::Extracted: return "EXTRACTED";
  }
  return "?";
}

void PlugParams::validate() const {
  if (!(stiffness > 0) || !(damping > 0) || !(break_force > 0) || !(release_tau > 0) ||
      !(capture_radius > 0)) {
    throw ConfigError("plug: stiffness, damping, break force, release tau, capture radius must be > 0");
  }
  if (std::abs(wedge_axis.norm() - 1.0) > 1e-9) throw ConfigError("plug: wedge axis must be a unit vector");
}

double plug_tension(const PlugAttachment& attach, const Vec3& ee_world) {
  const Vec3 d = ee_world - attach.params.anchor - attach.grip_offset;
  return attach.params.stiffness * d.dot(attach.params.wedge_axis);
}

Vec3 plug_force_world(const PlugAttachment& attach, const Vec3& ee_world, const Vec3& ee_vel_world,
                      double t) {
  switch (attach.state) {
    case AttachState::Free:
      return Vec3::Zero();
    case AttachState::Grasped: {
      const Vec3 d = ee_world - attach.params.anchor - attach.grip_offset;
      return -attach.params.stiffness * d - attach.params.damping * ee_vel_world;
    }
    case AttachState::Extracted:
      return attach.release_force * std::exp(-(t - attach.release_time) / attach.params.release_tau);
  }
  return Vec3::Zero();
}

PlugAttachment plug_transition(const PlugAttachment& attach, const Vec3& ee_world,
                               const Vec3& ee_vel_world, bool grip_closed, double t) {
  PlugAttachment next = attach;
  if (attach.state == AttachState::Free) {
    if (grip_closed && (ee_world - attach.params.anchor).norm() < attach.params.capture_radius) {
      next.state = AttachState::Grasped;
      next.grip_offset = ee_world - attach.params.anchor;
    }
  } else if (attach.state == AttachState::Grasped) {
    if (plug_tension(attach, ee_world) > attach.params.break_force) {
      next.release_force = plug_force_world(attach, ee_world, ee_vel_world, t);
      next.release_time = t;
      next.state = AttachState::Extracted;
    }
  }
  return next;
}

PlugForce plug_force(const PlugAttachment& attach, const Vec3& ee_world, const Vec3& ee_vel_world,
                     bool grip_closed, double t, const RotationMatrix& body_to_world) {
  PlugForce out;
  out.attachment = plug_transition(attach, ee_world, ee_vel_world, grip_closed, t);
  out.force_body =
      body_to_world.transpose() * plug_force_world(out.attachment, ee_world, ee_vel_world, t);
  return out;
}

}  // namespace plugpull::plant
