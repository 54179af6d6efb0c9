#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>

#include "plugpull/errors.hpp"
#include "plugpull/spatial_math.hpp"

using namespace plugpull;
using std::numbers::pi;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("rot_z elementary cases") {
  CHECK(max_abs(math::rot_z(0.0) - Mat3::Identity()) == 0.0);
  CHECK(max_abs(math::rot_z(pi / 2) * Vec3::UnitX() - Vec3::UnitY()) < 1e-15);
  CHECK(max_abs(math::rot_z(pi) - Vec3(-1, -1, 1).asDiagonal().toDenseMatrix()) < 1e-15);
}

TEST_CASE("rot_body composes yaw pitch roll") {
  CHECK(max_abs(math::rot_body({0, 0, 0}) - Mat3::Identity()) == 0.0);
  CHECK(max_abs(math::rot_body({0, 0, pi / 2}) - math::rot_z(pi / 2)) < 1e-15);

  const EulerAngles att{0.1, -0.2, 0.3};
  const Mat3 r = math::rot_body(att);
  const Mat3 oracle = (Eigen::AngleAxisd(0.3, Vec3::UnitZ()) * Eigen::AngleAxisd(-0.2, Vec3::UnitY()) *
                       Eigen::AngleAxisd(0.1, Vec3::UnitX()))
                          .toRotationMatrix();
  CHECK(max_abs(r - oracle) < 1e-15);
  CHECK(max_abs(r.transpose() * r - Mat3::Identity()) < 1e-15);
  CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("psi matrix is the printed involution") {
  Mat3 at0;
  at0 << 1, 0, 0, 0, -1, 0, 0, 0, 1;
  CHECK(max_abs(math::psi_matrix(0.0) - at0) < 1e-15);
  Mat3 at90;
  at90 << 0, 1, 0, 1, 0, 0, 0, 0, 1;
  CHECK(max_abs(math::psi_matrix(pi / 2) - at90) < 1e-15);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> yaw(-pi, pi);
  for (int i = 0; i < 100; ++i) {
    const Mat3 p = math::psi_matrix(yaw(rng));
    CHECK(max_abs(p * p - Mat3::Identity()) < 1e-12);
    CHECK(p.determinant() == doctest::Approx(-1.0));
  }
}

TEST_CASE("euler_rates inverts the ZYX body-rate map") {
  const Vec3 w(0.3, -0.2, 0.7);
  CHECK(max_abs(math::euler_rates({0, 0, 0}, w) - w) < 1e-15);
  CHECK(max_abs(math::euler_rate_jacobian({0, 0, 0}) - Mat3::Identity()) < 1e-15);

  // Q phi_dot = (0, 0, 1) at pitch pi/4: yaw rate sqrt(2), roll rate 1.
  const Vec3 r = math::euler_rates({0, pi / 4, 0}, Vec3::UnitZ());
  CHECK(r.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(r.y()) < 1e-12);
  CHECK(r.z() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("euler_rate_jacobian matches the rotation derivative") {
  // omega^ = R^T dR/dt with R(t) built from phi + t * phi_dot.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-1.2, 1.2);
  for (int i = 0; i < 200; ++i) {
    const Vec3 phi(ang(rng), ang(rng), ang(rng));
    const Vec3 phi_dot(ang(rng), ang(rng), ang(rng));
    const double h = 1e-6;
    const Mat3 r = math::rot_body(EulerAngles::from(phi));
    const Mat3 rp = math::rot_body(EulerAngles::from(phi + h * phi_dot));
    const Mat3 rm = math::rot_body(EulerAngles::from(phi - h * phi_dot));
    const Mat3 skew = r.transpose() * (rp - rm) / (2 * h);
    const Vec3 omega(skew(2, 1), skew(0, 2), skew(1, 0));
    CHECK(max_abs(math::euler_rate_jacobian(EulerAngles::from(phi)) * phi_dot - omega) < 1e-8);
    CHECK(max_abs(math::euler_rates(EulerAngles::from(phi), omega) - phi_dot) < 1e-7);
  }
}

TEST_CASE("euler_rates refuses near-vertical pitch") {
  CHECK_THROWS_AS(math::euler_rates({0, pi / 2 - 1e-6, 0}, Vec3(1, 2, 3)), SingularAttitude);
  CHECK_THROWS_AS(math::euler_rates({0, -pi / 2 + 1e-4, 0}, Vec3::Zero()), SingularAttitude);
  CHECK_NOTHROW(math::euler_rates({0, pi / 2 - 2e-3, 0}, Vec3::Zero()));
}
