#pragma once

#include <array>
#include <span>
#include <vector>

#include "plugpull/spatial_math.hpp"

namespace plugpull::teleop {

/// Degree-7 recovery reference. Coefficients are in SI units of the local time
/// tau = t - t_start, i.e. p(t) = sum_i coeffs[axis][i] * tau^i.
struct RecoveryTrajectory {
  double t_start = 0.0;
  double duration = 0.0;
  std::array<std::array<double, 8>, 3> coeffs{};

  double t_end() const { return t_start + duration; }
};

inline constexpr double kMinRecoveryWindow = 1e-3;

/// Minimum-snap polynomial leaving `position` with `velocity` at t_start and
/// returning to `position` at rest (zero velocity, acceleration and jerk)
/// after `duration`. Solved per axis from the KKT system in normalized time.
RecoveryTrajectory minsnap_solve(const Vec3& position, const Vec3& velocity, double t_start,
                                 double duration);

struct TrajectorySample {
  Vec3 position;
  Vec3 velocity;
};

/// Throws OutOfWindow outside [t_start, t_start + duration].
TrajectorySample minsnap_eval(const RecoveryTrajectory& traj, double t);

/// order-th time derivative at t (order 0..7), same window rule as minsnap_eval.
Vec3 minsnap_derivative(const RecoveryTrajectory& traj, double t, int order);

struct MinsnapInstance {
  Vec3 position;
  Vec3 velocity;
  double t_start;
  double duration;
};

/// Serial reference for batch solves.
std::vector<RecoveryTrajectory> minsnap_solve_batch_serial(std::span<const MinsnapInstance> in);
/// OpenMP version; results are identical to the serial path.
std::vector<RecoveryTrajectory> minsnap_solve_batch(std::span<const MinsnapInstance> in);

}  // namespace plugpull::teleop
