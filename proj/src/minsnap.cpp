#include "plugpull/minsnap.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "plugpull/errors.hpp"

namespace plugpull::teleop {

namespace {

constexpr int kCoeffs = 8;
constexpr int kConstraints = 6;
constexpr int kKkt = kCoeffs + kConstraints;

using KktMatrix = Eigen::Matrix<double, kKkt, kKkt>;
using KktVector = Eigen::Matrix<double, kKkt, 1>;

// d^k/ds^k s^i = falling(i, k) s^(i-k)
double falling(int i, int k) {
  double f = 1.0;
  for (int j = 0; j < k; ++j) f *= (i - j);
  return f;
}

// In normalized time s in [0, 1] the KKT matrix does not depend on the window
// length, so it is built and factorized once.
const Eigen::PartialPivLU<KktMatrix>& kkt_factorization() {
  static const Eigen::PartialPivLU<KktMatrix> lu = [] {
    KktMatrix k = KktMatrix::Zero();
    // Hessian of  int_0^1 (d^4 p / ds^4)^2 ds  (times 2).
    for (int i = 4; i < kCoeffs; ++i) {
      for (int j = 4; j < kCoeffs; ++j) {
        k(i, j) = 2.0 * falling(i, 4) * falling(j, 4) / (i + j - 7);
      }
    }
    // Rows: p(0), p(1), p'(0), p'(1), p''(1), p'''(1).
    Eigen::Matrix<double, kConstraints, kCoeffs> a = Eigen::Matrix<double, kConstraints, kCoeffs>::Zero();
    a(0, 0) = 1.0;
    a(2, 1) = 1.0;
    for (int i = 0; i < kCoeffs; ++i) {
      a(1, i) = 1.0;
      a(3, i) = falling(i, 1);
      a(4, i) = falling(i, 2);
      a(5, i) = falling(i, 3);
    }
    k.topRightCorner<kCoeffs, kConstraints>() = a.transpose();
    k.bottomLeftCorner<kConstraints, kCoeffs>() = a;
    return Eigen::PartialPivLU<KktMatrix>(k);
  }();
  return lu;
}

void check_window(const RecoveryTrajectory& traj, double t) {
  // Allow rounding slack at the window ends.
  const double slack = 1e-9 * std::max(1.0, std::abs(traj.t_end()));
  if (t < traj.t_start - slack || t > traj.t_end() + slack) {
    throw OutOfWindow("minsnap_eval: t = " + std::to_string(t) + " outside recovery window [" +
                      std::to_string(traj.t_start) + ", " + std::to_string(traj.t_end()) + "]");
  }
}

}  // namespace

RecoveryTrajectory minsnap_solve(const Vec3& position, const Vec3& velocity, double t_start,
                                 double duration) {
  if (!(duration >= kMinRecoveryWindow)) {
    throw DegenerateWindow("minsnap_solve: window " + std::to_string(duration) + " s too short");
  }
  RecoveryTrajectory traj;
  traj.t_start = t_start;
  traj.duration = duration;

  const auto& lu = kkt_factorization();
  for (int axis = 0; axis < 3; ++axis) {
    KktVector rhs = KktVector::Zero();
    rhs(kCoeffs + 0) = position[axis];
    rhs(kCoeffs + 1) = position[axis];
    rhs(kCoeffs + 2) = duration * velocity[axis];
    const KktVector sol = lu.solve(rhs);
    double scale = 1.0;
    for (int i = 0; i < kCoeffs; ++i) {
      traj.coeffs[axis][i] = sol(i) / scale;
      scale *= duration;
    }
  }
  return traj;
}

Vec3 minsnap_derivative(const RecoveryTrajectory& traj, double t, int order) {
  check_window(traj, t);
  const double tau = std::clamp(t - traj.t_start, 0.0, traj.duration);
  Vec3 out;
  for (int axis = 0; axis < 3; ++axis) {
    double acc = 0.0;
    for (int i = kCoeffs - 1; i >= order; --i) {
      acc = acc * tau + falling(i, order) * traj.coeffs[axis][i];
    }
    out[axis] = acc;
  }
  return out;
}

TrajectorySample minsnap_eval(const RecoveryTrajectory& traj, double t) {
  return {minsnap_derivative(traj, t, 0), minsnap_derivative(traj, t, 1)};
}

std::vector<RecoveryTrajectory> minsnap_solve_batch_serial(std::span<const MinsnapInstance> in) {
  std::vector<RecoveryTrajectory> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = minsnap_solve(in[i].position, in[i].velocity, in[i].t_start, in[i].duration);
  }
  return out;
}

std::vector<RecoveryTrajectory> minsnap_solve_batch(std::span<const MinsnapInstance> in) {
  for (const auto& inst : in) {
    if (!(inst.duration >= kMinRecoveryWindow)) {
      throw DegenerateWindow("minsnap_solve_batch: window too short");
    }
  }
  std::vector<RecoveryTrajectory> out(in.size());
  kkt_factorization();
  const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = minsnap_solve(in[i].position, in[i].velocity, in[i].t_start, in[i].duration);
  }
  return out;
}

}  // namespace plugpull::teleop
