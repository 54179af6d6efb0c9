#include <doctest.h>

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "plugpull/errors.hpp"
#include "plugpull/rk4.hpp"
#include "plugpull/teleop.hpp"

using namespace plugpull;
using namespace plugpull::teleop;

namespace {

// Small dense polynomial helpers, coefficients lowest order first.
using Poly = std::vector<double>;

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly pow(const Poly& a, int n) {
  Poly out{1.0};
  for (int i = 0; i < n; ++i) out = mul(out, a);
  return out;
}

Poly deriv(const Poly& a, int order) {
  Poly out = a;
  for (int o = 0; o < order; ++o) {
    if (out.size() <= 1) return {0.0};
    Poly d(out.size() - 1);
    for (std::size_t i = 1; i < out.size(); ++i) d[i - 1] = i * out[i];
    out = d;
  }
  return out;
}

double eval(const Poly& a, double x) {
  double s = 0;
  for (std::size_t i = a.size(); i-- > 0;) s = s * x + a[i];
  return s;
}

// 5-point Gauss-Legendre on [0, T]: exact for degree <= 9.
double integrate(const std::function<double(double)>& f, double T) {
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                              0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                              0.2369268850561891, 0.2369268850561891};
  double s = 0;
  for (int i = 0; i < 5; ++i) s += w[i] * f(0.5 * T * (x[i] + 1));
  return 0.5 * T * s;
}

Poly axis_poly(const RecoveryTrajectory& tr, int axis) {
  return Poly(tr.coeffs[axis].begin(), tr.coeffs[axis].end());
}

double snap_cost(const Poly& p, double T) {
  const Poly s = deriv(p, 4);
  return integrate([&](double x) { return eval(s, x) * eval(s, x); }, T);
}

// Independent optimum: p0 + v0 g + a d1 + b d2 over the two-dimensional
// feasible null space, minimized by normal equations on the snap cost.
struct NullSpace {
  Poly base, d1, d2;
};

NullSpace null_space(double p0, double v0, double T) {
  const Poly tail = pow({T, -1.0}, 4);  // (T - tau)^4
  NullSpace n;
  Poly g = mul({0.0, 1.0 / std::pow(T, 4)}, tail);
  n.base = g;
  for (double& c : n.base) c *= v0;
  n.base[0] += p0;
  n.d1 = mul({0, 0, 1}, tail);
  n.d2 = mul({0, 0, 0, 1}, tail);
  return n;
}

Poly combine(const NullSpace& n, double a, double b) {
  Poly out(8, 0.0);
  for (std::size_t i = 0; i < n.base.size(); ++i) out[i] += n.base[i];
  for (std::size_t i = 0; i < n.d1.size(); ++i) out[i] += a * n.d1[i];
  for (std::size_t i = 0; i < n.d2.size(); ++i) out[i] += b * n.d2[i];
  return out;
}

Poly reference_optimum(double p0, double v0, double T) {
  const NullSpace n = null_space(p0, v0, T);
  const Poly s0 = deriv(n.base, 4), s1 = deriv(n.d1, 4), s2 = deriv(n.d2, 4);
  auto ip = [&](const Poly& a, const Poly& b) {
    return integrate([&](double x) { return eval(a, x) * eval(b, x); }, T);
  };
  Eigen::Matrix2d h;
  h << ip(s1, s1), ip(s1, s2), ip(s2, s1), ip(s2, s2);
  const Eigen::Vector2d rhs(-ip(s1, s0), -ip(s2, s0));
  const Eigen::Vector2d ab = h.fullPivLu().solve(rhs);
  return combine(n, ab[0], ab[1]);
}

double boundary_residual(const RecoveryTrajectory& tr, const Vec3& p, const Vec3& v) {
  double r = 0;
  r = std::max(r, (minsnap_derivative(tr, tr.t_start, 0) - p).cwiseAbs().maxCoeff());
  r = std::max(r, (minsnap_derivative(tr, tr.t_start, 1) - v).cwiseAbs().maxCoeff());
  r = std::max(r, (minsnap_derivative(tr, tr.t_end(), 0) - p).cwiseAbs().maxCoeff());
  for (int o = 1; o <= 3; ++o) r = std::max(r, minsnap_derivative(tr, tr.t_end(), o).cwiseAbs().maxCoeff());
  return r;
}

}  // namespace

TEST_CASE("velocity mapping") {
  TeleopParams p;
  CHECK(velocity_mapping(p, Vec3::Zero()).norm() == 0.0);
  const Vec3 v = velocity_mapping(p, Vec3(0.2, 0, 0));
  CHECK(v.x() == doctest::Approx(0.4 * std::tanh(1.0)));
  CHECK(v.x() == doctest::Approx(0.30463).epsilon(1e-5));

  std::mt19937_64 rng(1);
  // Up to five handle ranges; far beyond that tanh rounds to exactly 1.
  std::uniform_real_distribution<double> d(-1, 1);
  for (int i = 0; i < 500; ++i) {
    const Vec3 ph(d(rng), d(rng), d(rng));
    const Vec3 a = velocity_mapping(p, ph);
    CHECK((velocity_mapping(p, -ph) + a).norm() < 1e-15);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(a[k]) < p.v_max[k]);
    Vec3 up = ph;
    up[0] += 0.01;
    CHECK(velocity_mapping(p, up)[0] >= a[0]);
  }
}

TEST_CASE("reference integration") {
  ReferenceState r{Vec3(1, 2, 3), Vec3::Zero()};
  CHECK((integrate_reference(r, Vec3::Zero(), 0.3, 0.01).position - r.position).norm() == 0.0);

  ReferenceState s{Vec3::Zero(), Vec3(0.1, 0, 0)};
  for (int k = 0; k < 1000; ++k) s = integrate_reference(s, Vec3(0.1, 0, 0), 0.0, 2e-3);
  CHECK((s.position - Vec3(0.2, 0, 0)).norm() < 1e-12);

  const auto w = integrate_reference({}, Vec3(0.1, 0, 0), std::numbers::pi / 2, 2e-3);
  CHECK((w.velocity - Vec3(0, 0.1, 0)).norm() < 1e-15);
}

TEST_CASE("onboard joint targets") {
  CHECK((desired_joint_angles({0.1, -0.2, 1.3}, 0.5) - Vec3(-0.1, 0.2, 0.5)).norm() == 0.0);
  CHECK((desired_joint_angles({}, 0.7) - Vec3(0, 0, 0.7)).norm() == 0.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int i = 0; i < 100; ++i) {
    const EulerAngles a{d(rng), d(rng), d(rng)};
    const Vec3 j = desired_joint_angles(a, d(rng));
    CHECK(j[0] == -a.roll);
    CHECK(j[1] == -a.pitch);
  }
}

TEST_CASE("detection threshold and arming") {
  TeleopParams p;
  PhaseState armed;
  armed.armed = true;
  CHECK(detect_extraction(p, armed, Vec3(7.5, 0, 0)));
  CHECK_FALSE(detect_extraction(p, armed, Vec3(7.4, 0, 0)));
  PhaseState open;
  CHECK_FALSE(detect_extraction(p, open, Vec3(20, 0, 0)));
  p.arming_guards = false;
  CHECK(detect_extraction(p, open, Vec3(20, 0, 0)));
  PhaseState rec = armed;
  rec.phase = Phase::Recovery;
  CHECK_FALSE(detect_extraction(p, rec, Vec3(50, 0, 0)));
}

TEST_CASE("arming needs closed grip and force over the debounce window") {
  TeleopParams p;
  PhaseState s;
  double t = 0;
  for (; t < 0.099; t += 2e-3) {
    s = update_arming(p, s, Vec3(4, 0, 0), true, t);
    CHECK_FALSE(s.armed);
  }
  s = update_arming(p, s, Vec3(4, 0, 0), true, 0.1);
  CHECK(s.armed);
  CHECK_FALSE(update_arming(p, s, Vec3(4, 0, 0), false, 0.102).armed);
  CHECK_FALSE(update_arming(p, s, Vec3(2, 0, 0), true, 0.102).armed);
}

TEST_CASE("phase transitions") {
  TeleopParams p;
  PhaseState s;
  CHECK(phase_step(p, s, false, 3.0, Vec3::Zero(), Vec3::Zero(), 0.0).phase == Phase::Nominal);

  const Vec3 pos(1, 2, 3), vel(0.3, -0.1, 0.2);
  const auto r = phase_step(p, s, true, 10.0, pos, vel, 0.6);
  CHECK(r.phase == Phase::Recovery);
  CHECK(r.t_e == 10.0);
  CHECK(r.p_e == pos);
  CHECK(r.v_e == vel);
  CHECK(r.frozen_grip == 0.6);
  REQUIRE(r.trajectory);

  CHECK(phase_step(p, r, false, 14.998, pos, vel, 0.6).phase == Phase::Recovery);
  CHECK(phase_step(p, r, true, 12.0, pos, vel, 0.6).t_e == 10.0);
  CHECK(phase_step(p, r, false, 15.0, pos, vel, 0.6).phase == Phase::Nominal);
}

TEST_CASE("fuzzed detections never re-enter recovery") {
  TeleopParams p;
  std::mt19937_64 rng(3);
  std::bernoulli_distribution fire(0.02);
  PhaseState s;
  int entries = 0;
  for (int k = 0; k < 200000; ++k) {
    const double t = k * 2e-3;
    const PhaseState before = s;
    s = phase_step(p, s, fire(rng), t, Vec3::Zero(), Vec3(0.1, 0, 0), 0.0);
    if (before.phase == Phase::Nominal && s.phase == Phase::Recovery) ++entries;
    if (before.phase == Phase::Recovery && s.phase == Phase::Recovery) {
      CHECK(s.t_e == before.t_e);
      CHECK(t < s.t_e + p.recovery_duration);
    }
  }
  CHECK(entries > 10);
}

TEST_CASE("recovery rate command") {
  const Mat4 k = Vec4(6, 2, 15, 15).asDiagonal();
  const Vec4 home(0.1, 0.2, 0.3, 0.4);
  CHECK(haptic_recovery_rate(k, home, home).norm() == 0.0);
  CHECK((haptic_recovery_rate(k, Vec4(1, 0, 0, 0), Vec4::Zero()) - Vec4(-6, 0, 0, 0)).norm() == 0.0);

  // Perfect rate tracking: theta_dot = command.
  Vec4 th(1, 0, 0, 0);
  auto f = [&](const Vec4& x, double) { return Vec4(haptic_recovery_rate(k, x, Vec4::Zero())); };
  double worst = 0;
  for (int i = 1; i <= 1000; ++i) {
    th = sim::rk4_step(f, th, 0.0, 1e-3);
    worst = std::max(worst, std::abs(th[0] - std::exp(-6.0 * i * 1e-3)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("min-snap with zero velocity is constant") {
  const Vec3 p(1, -2, 3);
  const auto tr = minsnap_solve(p, Vec3::Zero(), 4.0, 5.0);
  for (int a = 0; a < 3; ++a) {
    CHECK(tr.coeffs[a][0] == doctest::Approx(p[a]));
    for (int i = 1; i < 8; ++i) CHECK(std::abs(tr.coeffs[a][i]) < 1e-10);
  }
}

TEST_CASE("min-snap is linear in the entry velocity") {
  const Vec3 p(0.5, 0.1, 1.0), v(0.3, -0.2, 0.1);
  const auto a = minsnap_solve(p, v, 0.0, 5.0);
  const auto b = minsnap_solve(p, 2 * v, 0.0, 5.0);
  for (double t = 0; t <= 5.0; t += 0.1) {
    const Vec3 da = minsnap_eval(a, t).position - p;
    const Vec3 db = minsnap_eval(b, t).position - p;
    CHECK((db - 2 * da).norm() < 1e-12);
  }
}

TEST_CASE("min-snap boundary conditions and window") {
  const Vec3 p(0.2, 0.0, 0.9), v(0.3, 0, 0);
  const auto tr = minsnap_solve(p, v, 2.0, 5.0);
  CHECK(boundary_residual(tr, p, v) <= 1e-9);
  const auto s0 = minsnap_eval(tr, 2.0);
  CHECK((s0.position - p).norm() < 1e-12);
  CHECK((s0.velocity - v).norm() < 1e-12);
  const auto s1 = minsnap_eval(tr, 7.0);
  CHECK((s1.position - p).norm() < 1e-9);
  CHECK(s1.velocity.norm() < 1e-9);
  CHECK_THROWS_AS(minsnap_eval(tr, 1.999), OutOfWindow);
  CHECK_THROWS_AS(minsnap_eval(tr, 7.001), OutOfWindow);
  CHECK_THROWS_AS(minsnap_solve(p, v, 0.0, 0.0), DegenerateWindow);
}

TEST_CASE("min-snap is optimal against feasible perturbations") {
  const double T = 5.0;
  const auto tr = minsnap_solve(Vec3::Zero(), Vec3(0.3, 0, 0), 0.0, T);
  const Poly p = axis_poly(tr, 0);
  const double j0 = snap_cost(p, T);
  const NullSpace n = null_space(0.0, 0.3, T);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> d(0, 1e-3);
  for (int i = 0; i < 1000; ++i) {
    Poly q = p;
    const double a = d(rng), b = d(rng) / T;
    for (std::size_t k = 0; k < n.d1.size(); ++k) q[k] += a * n.d1[k];
    for (std::size_t k = 0; k < n.d2.size(); ++k) q[k] += b * n.d2[k];
    CHECK(snap_cost(q, T) >= j0 * (1 - 1e-12));
  }
}

TEST_CASE("min-snap matches an independent null-space solve") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1, 1), dur(0.5, 10);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p(d(rng), d(rng), d(rng)), v(d(rng), d(rng), d(rng));
    const double T = dur(rng);
    const auto tr = minsnap_solve(p, v, 1.0, T);
    for (int a = 0; a < 3; ++a) {
      const Poly ref = reference_optimum(p[a], v[a], T);
      for (int k = 1; k < 20; ++k) {
        const double tau = T * k / 20.0;
        CHECK(minsnap_eval(tr, 1.0 + tau).position[a] == doctest::Approx(eval(ref, tau)).epsilon(1e-8).scale(1.0));
        CHECK(minsnap_eval(tr, 1.0 + tau).velocity[a] ==
              doctest::Approx(eval(deriv(ref, 1), tau)).epsilon(1e-8).scale(1.0));
      }
    }
  }
}

TEST_CASE("min-snap residuals over random instances and long windows") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(-2, 2), dur(0.5, 10);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(d(rng), d(rng), d(rng)), v(d(rng), d(rng), d(rng));
    worst = std::max(worst, boundary_residual(minsnap_solve(p, v, d(rng), dur(rng)), p, v));
  }
  CHECK(worst <= 1e-9);
  for (double T : {20.0, 40.0, 60.0}) {
    const Vec3 p(1, 2, 3), v(0.5, -0.4, 0.3);
    CHECK(boundary_residual(minsnap_solve(p, v, 0.0, T), p, v) <= 1e-8);
  }
}

TEST_CASE("batch solve: OpenMP equals serial") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-2, 2), dur(0.5, 10);
  std::vector<MinsnapInstance> in;
  for (int i = 0; i < 500; ++i) in.push_back({Vec3(d(rng), d(rng), d(rng)), Vec3(d(rng), d(rng), d(rng)), d(rng), dur(rng)});
  const auto a = minsnap_solve_batch_serial(in);
  const auto b = minsnap_solve_batch(in);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].coeffs == b[i].coeffs);
}
