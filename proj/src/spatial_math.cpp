#include "plugpull/spatial_math.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "plugpull/errors.hpp"

namespace plugpull::math {

RotationMatrix rot_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  RotationMatrix r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

RotationMatrix rot_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  RotationMatrix r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

RotationMatrix rot_z(double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  RotationMatrix r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

RotationMatrix rot_body(const EulerAngles& att) {
  return rot_z(att.yaw) * rot_y(att.pitch) * rot_x(att.roll);
}

Mat3 psi_matrix(double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  Mat3 psi;
  psi << c, s, 0,
         s, -c, 0,
         0, 0, 1;
  return psi;
}

Mat3 euler_rate_jacobian(const EulerAngles& att) {
  const double c1 = std::cos(att.roll), s1 = std::sin(att.roll);
  const double c2 = std::cos(att.pitch), s2 = std::sin(att.pitch);
  Mat3 q;
  q << 1, 0, -s2,
       0, c1, s1 * c2,
       0, -s1, c1 * c2;
  return q;
}

Vec3 euler_rates(const EulerAngles& att, const Vec3& omega_d) {
  if (std::abs(att.pitch) >= std::numbers::pi / 2 - kSingularityMargin) {
    throw SingularAttitude("euler_rates: pitch " + std::to_string(att.pitch) +
                           " rad is at the Euler singularity");
  }
  // Closed-form inverse of Q; det(Q) = cos(pitch).
  const double c1 = std::cos(att.roll), s1 = std::sin(att.roll);
  const double c2 = std::cos(att.pitch), t2 = std::tan(att.pitch);
  Mat3 q_inv;
  q_inv << 1, s1 * t2, c1 * t2,
           0, c1, -s1,
           0, s1 / c2, c1 / c2;
  return q_inv * omega_d;
}

}  // namespace plugpull::math
