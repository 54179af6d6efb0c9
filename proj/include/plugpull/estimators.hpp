#pragma once

#include <array>

#include <Eigen/Core>

#include "plugpull/plant.hpp"
#include "plugpull/spatial_math.hpp"

namespace plugpull::est {

// ---------------------------------------------------------------------------
// Disturbance observer on the UAM translation
// ---------------------------------------------------------------------------

struct DobState {
  Vec3 zeta = Vec3::Zero();  // filtered velocity [m/s]
  Vec3 chi = Vec3::Zero();   // filtered u_c / m_hat [m/s^2]
  Mat3 gain_zeta = Mat3::Identity();
  Mat3 gain_chi = Mat3::Identity();
  double nu = 0.2;
  double mass_hat = 2.5;
  double g_hat = 9.81;

  /// zeta starts at the measured velocity, chi at g * e3.
  static DobState initial(const Vec3& velocity, double nu, double mass_hat, double g_hat,
                          const Mat3& gain_zeta = Mat3::Identity(),
                          const Mat3& gain_chi = Mat3::Identity());
};

struct DobOutput {
  DobState state;
  Vec3 force;  // world frame [N]
};

/// One explicit-Euler step of the velocity/input filter pair. `applied_input`
/// must be the thrust vector actually applied (from real thrust and attitude).
DobOutput dob_step(const DobState& s, const Vec3& velocity, const Vec3& applied_input, double dt);

// ---------------------------------------------------------------------------
// Generalized-momentum observer on the haptic arm
// ---------------------------------------------------------------------------

struct MomentumObserverState {
  Vec4 integral = Vec4::Zero();
  Vec4 estimate = Vec4::Zero();
  Mat4 gain = 30.0 * Mat4::Identity();
  Vec4 initial_momentum = Vec4::Zero();

  static MomentumObserverState initial(const Mat4& gain, const Mat4& mass0, const Vec4& rate0);
};

struct MomentumObserverOutput {
  MomentumObserverState state;
  Vec4 torque;
};

MomentumObserverOutput momentum_observer_step(const MomentumObserverState& s,
                                              const plant::ArmDynamics& dyn, const Vec4& rate,
                                              const Vec4& tau_joint, double dt);

// ---------------------------------------------------------------------------
// Constant-slope Kalman filter for the force derivative
// ---------------------------------------------------------------------------

struct ForceDerivativeKf {
  std::array<Eigen::Vector2d, 3> x;  // (f, f_dot) per axis
  std::array<Eigen::Matrix2d, 3> p;
  double q = 100.0;   // white-jerk intensity [N^2/s^3]
  double r = 0.01;    // measurement variance [N^2]
  double initial_rate_variance = 100.0;
  bool initialized = false;

  explicit ForceDerivativeKf(double q_ = 100.0, double r_ = 0.01);
};

struct KfOutput {
  ForceDerivativeKf state;
  Vec3 rate;  // N/s
};

/// The first call only seeds the state with the measurement and returns zero.
KfOutput kf_derivative_step(const ForceDerivativeKf& s, const Vec3& force, double dt);

}  // namespace plugpull::est
