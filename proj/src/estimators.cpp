#include "plugpull/estimators.hpp"

namespace plugpull::est {

DobState DobState::initial(const Vec3& velocity, double nu, double mass_hat, double g_hat,
                           const Mat3& gain_zeta, const Mat3& gain_chi) {
  DobState s;
  s.zeta = velocity;
  s.chi = g_hat * Vec3::UnitZ();
  s.gain_zeta = gain_zeta;
  s.gain_chi = gain_chi;
  s.nu = nu;
  s.mass_hat = mass_hat;
  s.g_hat = g_hat;
  return s;
}

DobOutput dob_step(const DobState& s, const Vec3& velocity, const Vec3& applied_input, double dt) {
  DobOutput out{s, Vec3::Zero()};
  const double inv_nu = 1.0 / s.nu;
  out.state.zeta += dt * (-inv_nu * s.gain_zeta * (s.zeta - velocity));
  out.state.chi += dt * (-inv_nu * s.gain_chi * (s.chi - applied_input / s.mass_hat));
  out.force = -s.mass_hat * inv_nu * s.gain_zeta * (out.state.zeta - velocity) +
              s.mass_hat * s.g_hat * Vec3::UnitZ() - s.mass_hat * out.state.chi;
  return out;
}

MomentumObserverState MomentumObserverState::initial(const Mat4& gain, const Mat4& mass0,
                                                     const Vec4& rate0) {
  MomentumObserverState s;
  s.gain = gain;
  s.initial_momentum = mass0 * rate0;
  return s;
}

MomentumObserverOutput momentum_observer_step(const MomentumObserverState& s,
                                              const plant::ArmDynamics& dyn, const Vec4& rate,
                                              const Vec4& tau_joint, double dt) {
  MomentumObserverOutput out{s, Vec4::Zero()};
  out.state.integral += dt * (tau_joint - dyn.coriolis * rate - dyn.gravity + s.estimate);
  out.state.estimate = s.gain * (dyn.mass * rate - out.state.integral - s.initial_momentum);
  out.torque = out.state.estimate;
  return out;
}

ForceDerivativeKf::ForceDerivativeKf(double q_, double r_) : q(q_), r(r_) {
  for (int i = 0; i < 3; ++i) {
    x[i].setZero();
    p[i].setZero();
  }
}

KfOutput kf_derivative_step(const ForceDerivativeKf& s, const Vec3& force, double dt) {
  KfOutput out{s, Vec3::Zero()};
  ForceDerivativeKf& k = out.state;
  if (!k.initialized) {
    for (int i = 0; i < 3; ++i) {
      k.x[i] << force[i], 0.0;
      k.p[i] << k.r, 0.0, 0.0, k.initial_rate_variance;
    }
    k.initialized = true;
    return out;
  }

  Eigen::Matrix2d f;
  f << 1.0, dt, 0.0, 1.0;
  Eigen::Matrix2d q;
  q << dt * dt * dt / 3.0, dt * dt / 2.0, dt * dt / 2.0, dt;
  q *= k.q;
  const Eigen::RowVector2d h(1.0, 0.0);

  for (int i = 0; i < 3; ++i) {
    Eigen::Vector2d x = f * k.x[i];
    Eigen::Matrix2d p = f * k.p[i] * f.transpose() + q;
    const double innovation_var = p(0, 0) + k.r;
    const Eigen::Vector2d gain = p.col(0) / innovation_var;
    x += gain * (force[i] - x[0]);
    // Joseph form keeps P symmetric PSD under rounding.
    const Eigen::Matrix2d a = Eigen::Matrix2d::Identity() - gain * h;
    p = a * p * a.transpose() + k.r * gain * gain.transpose();
    k.x[i] = x;
    k.p[i] = 0.5 * (p + p.transpose());
    out.rate[i] = x[1];
  }
  return out;
}

}  // namespace plugpull::est
