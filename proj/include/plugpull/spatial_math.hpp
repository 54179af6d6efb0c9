#pragma once

#include <Eigen/Core>

namespace plugpull {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using RotationMatrix = Eigen::Matrix3d;

/// ZYX Euler angles of the multirotor body (roll about x, pitch about y, yaw about z).
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Vec3 vec() const { return {roll, pitch, yaw}; }
  static EulerAngles from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
};

namespace math {

inline constexpr double kSingularityMargin = 1e-3;

RotationMatrix rot_x(double angle);
RotationMatrix rot_y(double angle);
RotationMatrix rot_z(double yaw);

/// Body-to-world rotation R_z(yaw) * R_y(pitch) * R_x(roll).
RotationMatrix rot_body(const EulerAngles& att);

/// The yaw-dependent involution [[c, s, 0], [s, -c, 0], [0, 0, 1]] used by the
/// thrust model and its inverse. Note det = -1.
Mat3 psi_matrix(double yaw);

/// Map from Euler-angle rates to body rates, omega = Q(att) * att_dot.
Mat3 euler_rate_jacobian(const EulerAngles& att);

/// Euler-angle rates from desired body rates. Throws SingularAttitude when
/// |pitch| is within kSingularityMargin of pi/2.
Vec3 euler_rates(const EulerAngles& att, const Vec3& omega_d);

}  // namespace math
}  // namespace plugpull
