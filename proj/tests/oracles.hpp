#pragma once
// Closed-loop simulations shared by the estimator tests and the acceptance run.

#include <cmath>
#include <vector>

#include "plugpull/controllers.hpp"
#include "plugpull/estimators.hpp"
#include "plugpull/plant.hpp"
#include "plugpull/rk4.hpp"

namespace plugpull::oracle {

struct Trans {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Trans operator+(const Trans& o) const { return {p + o.p, v + o.v}; }
  friend Trans operator*(double s, const Trans& x) { return {s * x.p, s * x.v}; }
};

struct DobRun {
  std::vector<double> t;
  std::vector<Vec3> fhat;
};

// Level UAM under PD + DOB compensation; a constant world force switches on at t_step.
inline DobRun dob_closed_loop(double nu, const Vec3& f_true, double t_step, double duration) {
  const double m = 2.5, g = 9.81, h = 1e-3, dt = 2e-3;
  ctrl::UamGains gains;
  auto dob = est::DobState::initial(Vec3::Zero(), nu, m, g);
  Trans x;
  Vec3 fhat = Vec3::Zero();
  DobRun out;
  const int n = static_cast<int>(std::lround(duration / dt));
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    const Vec3 u = ctrl::position_control(gains, x.p, x.v, Vec3::Zero(), Vec3::Zero(), fhat,
                                          Mat3::Identity());
    for (int j = 0; j < 2; ++j) {
      const double s = t + j * h;
      auto f = [&](const Trans& y, double tt) {
        const Vec3 ext = tt >= t_step ? f_true : Vec3::Zero();
        return Trans{y.v, -g * Vec3::UnitZ() + (u + ext) / m};
      };
      x = sim::rk4_step(f, x, s, h);
    }
    const auto r = est::dob_step(dob, x.v, u, dt);
    dob = r.state;
    fhat = r.force;
    out.t.push_back(t + dt);
    out.fhat.push_back(fhat);
  }
  return out;
}

struct ArmX {
  Vec4 q = Vec4::Zero();
  Vec4 v = Vec4::Zero();
  ArmX operator+(const ArmX& o) const { return {q + o.q, v + o.v}; }
  friend ArmX operator*(double s, const ArmX& x) { return {s * x.q, s * x.v}; }
};

// Arm held near home by a PD servo with gravity compensation, constant
// external joint torque. Returns the estimate at every control tick.
inline std::vector<Vec4> observer_run(const Vec4& tau_ext, double duration, const Vec4& q0 = Vec4(0, 0.2, -0.3, 0.1)) {
  plant::HapticArmModel m;
  const double h = 1e-3, dt = 2e-3;
  ArmX x{q0, Vec4::Zero()};
  auto obs = est::MomentumObserverState::initial(30.0 * Mat4::Identity(), plant::arm_mass_matrix(m, x.q), x.v);
  std::vector<Vec4> out;
  const int n = static_cast<int>(std::lround(duration / dt));
  for (int k = 0; k < n; ++k) {
    const auto dyn = plant::arm_dynamics(m, {x.q, x.v});
    const Vec4 tau = dyn.gravity - 20.0 * (x.q - q0) - 2.0 * x.v;
    const auto r = est::momentum_observer_step(obs, dyn, x.v, tau, dt);
    obs = r.state;
    out.push_back(r.torque);
    auto f = [&](const ArmX& y, double) { return ArmX{y.v, plant::arm_accel(m, {y.q, y.v}, tau, tau_ext)}; };
    for (int j = 0; j < 2; ++j) x = sim::rk4_step(f, x, 0.0, h);
  }
  return out;
}

}  // namespace plugpull::oracle
