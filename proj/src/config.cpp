#include "plugpull/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "plugpull/errors.hpp"

namespace plugpull::sim {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(Mode m) { return m == Mode::Baseline ? "baseline" : "proposed"; }

Mode mode_from_string(const std::string& s) {
  if (s == "baseline") return Mode::Baseline;
  if (s == "proposed") return Mode::Proposed;
  throw ConfigError("mode must be 'baseline' or 'proposed', got '" + s + "'");
}

namespace {

bool positive_diag(const auto& m) {
  for (int i = 0; i < m.rows(); ++i) {
    if (!(m(i, i) > 0)) return false;
  }
  return true;
}

bool finite(const auto& v) { return v.allFinite(); }

// ---------------------------------------------------------------------------
// JSON reading
// ---------------------------------------------------------------------------

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    read(*it, out, path_ + "." + key);
  }

  template <class F>
  void object(const char* key, F&& f) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    Reader sub(*it, path_ + "." + key);
    f(sub);
    sub.finish();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  static double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + ": not finite");
    return x;
  }

  static void read(const json& v, double& out, const std::string& where) { out = number(v, where); }

  static void read(const json& v, bool& out, const std::string& where) {
    if (!v.is_boolean()) throw ConfigError(where + ": expected true/false");
    out = v.get<bool>();
  }

  static void read(const json& v, std::uint64_t& out, const std::string& where) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(where + ": expected a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }

  static void read(const json& v, Mode& out, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + ": expected a string");
    out = mode_from_string(v.get<std::string>());
  }

  template <int N>
  static Eigen::Matrix<double, N, 1> vector(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != static_cast<std::size_t>(N)) {
      throw ConfigError(where + ": expected an array of " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) out[i] = number(v[i], where);
    return out;
  }

  static void read(const json& v, Vec3& out, const std::string& where) { out = vector<3>(v, where); }
  static void read(const json& v, Vec4& out, const std::string& where) { out = vector<4>(v, where); }
  static void read(const json& v, Mat3& out, const std::string& where) {
    out = vector<3>(v, where).asDiagonal();
  }
  static void read(const json& v, Mat4& out, const std::string& where) {
    out = vector<4>(v, where).asDiagonal();
  }
  static void read(const json& v, std::array<double, 4>& out, const std::string& where) {
    const Vec4 x = vector<4>(v, where);
    for (int i = 0; i < 4; ++i) out[i] = x[i];
  }
  static void read(const json& v, std::vector<Vec3>& out, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of [x, y, z]");
    out.clear();
    for (const auto& e : v) out.push_back(vector<3>(e, where));
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ordered_json arr(const auto& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json diag(const auto& m) { return arr(m.diagonal().eval()); }

}  // namespace

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

int ScenarioConfig::control_substeps() const {
  return static_cast<int>(std::lround(timing.control_dt / timing.physics_dt));
}

std::int64_t ScenarioConfig::control_ticks() const {
  return static_cast<std::int64_t>(std::llround(timing.duration / timing.control_dt));
}

void ScenarioConfig::validate() const {
  const auto& tm = timing;
  if (!(tm.physics_dt > 0) || !(tm.control_dt > 0) || !(tm.duration > 0) || !(tm.telemetry_hz > 0)) {
    throw ConfigError("timing: physics_dt, control_dt, duration and telemetry_hz must be positive");
  }
  if (tm.physics_dt > tm.control_dt * (1 + 1e-12)) {
    throw ConfigError("timing: physics_dt must not exceed control_dt");
  }
  const double ratio = tm.control_dt / tm.physics_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ConfigError("timing: control_dt must be an integer multiple of physics_dt");
  }
  if (tm.telemetry_hz > 1.0 / tm.control_dt) {
    throw ConfigError("timing: telemetry_hz exceeds the control rate");
  }

  if (!(uam.mass > 0) || !(uam.gravity > 0) || !(uam.joint_rate_limit > 0) ||
      !(uam.arm.reach > 0) || !(uam.tilt_limit > 0) || !(uam.tilt_limit < 1.5)) {
    throw ConfigError("uam: mass, gravity, reach, joint rate limit and tilt limit must be positive");
  }
  if (!finite(uam.initial_position) || !finite(uam.arm.mount)) throw ConfigError("uam: non-finite vector");

  const auto& g = uam_gains;
  if (!positive_diag(g.kp) || !positive_diag(g.kd) || !positive_diag(g.kr) || !(g.mass_hat > 0) ||
      !(g.g_hat > 0)) {
    throw ConfigError("gains: kp, kd, kr, mass_hat and g_hat must be positive");
  }

  if (!(dob.nu > 0) || !(dob.nu_estimation >= 0) || !(dob.gain_zeta.minCoeff() > 0) ||
      !(dob.gain_chi.minCoeff() > 0)) {
    throw ConfigError("dob: nu and filter gains must be positive");
  }
  if (!(kf.q > 0) || !(kf.r > 0)) throw ConfigError("kf: q and r must be positive");

  haptic.arm.validate();
  const auto& a = haptic.gains;
  if (!positive_diag(a.inertia) || !positive_diag(a.damping) || !positive_diag(a.recenter) ||
      !positive_diag(a.recovery) || !(a.k_dg > 0) || !(a.k_fbg > 0) || !(a.k_tau > 0) ||
      !(a.force_reflection_scale >= 0)) {
    throw ConfigError("haptic.gains: admittance and gripper gains must be positive");
  }
  const auto& sv = haptic.servo;
  if (!(sv.arm_kp > 0) || !(sv.arm_kd > 0) || !(sv.grip_kp > 0) || !(sv.grip_kd > 0)) {
    throw ConfigError("haptic.servo: gains must be positive");
  }
  if (!(haptic.gripper_inertia > 0) || !(haptic.grip_max > haptic.grip_min) ||
      !(haptic.observer_gain.minCoeff() > 0) || !finite(haptic.initial_theta)) {
    throw ConfigError("haptic: gripper inertia, grip range and observer gain invalid");
  }

  teleop.validate();
  plug.validate();
  if (!finite(plug.anchor)) throw ConfigError("plug: non-finite anchor");

  const auto& o = op;
  if (!(o.reaction_time >= 0) || !(o.hand_tau > 0) || !(o.start_delay >= 0) ||
      !(o.pull_peak > 0) || !(o.pull_rate > 0) || !(o.approach_gain > 0) ||
      !(o.approach_max_displacement > 0) || !(o.hand_stiffness > 0) || !(o.hand_damping >= 0) ||
      !(o.pull_line_stiffness >= 0) || !(o.approach_tolerance > 0) ||
      !(o.approach_speed_tolerance > 0) || !(o.approach_settle >= 0) || !(o.grip_torque >= 0) ||
      !(o.grip_ramp >= 0) || !(o.grasp_hold >= 0) || !(o.tremor_amplitude >= 0) ||
      !(o.tremor_frequency >= 0)) {
    throw ConfigError("operator: invalid parameter (negative time, force or gain)");
  }
  if (std::abs(o.pull_direction.norm() - 1.0) > 1e-9) {
    throw ConfigError("operator: pull_direction must be a unit vector");
  }

  const auto& v = variation;
  if (!(v.anchor_jitter >= 0) || !(v.pull_rate_jitter >= 0) || !(v.pull_rate_jitter < 1) ||
      !(v.pull_peak_jitter >= 0) || !(v.pull_peak_jitter < 1) || !(v.pull_angle_jitter >= 0)) {
    throw ConfigError("variation: jitters must be non-negative (relative ones below 1)");
  }
  if (!(limits.max_position > 0) || !(limits.max_arm_rate > 0)) {
    throw ConfigError("limits: bounds must be positive");
  }
}

ScenarioConfig resolve_variations(const ScenarioConfig& cfg) {
  ScenarioConfig out = cfg;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto& v = cfg.variation;
  for (int i = 0; i < 3; ++i) out.plug.anchor[i] += v.anchor_jitter * u(rng);
  out.op.pull_rate *= 1.0 + v.pull_rate_jitter * u(rng);
  out.op.pull_peak *= 1.0 + v.pull_peak_jitter * u(rng);
  out.op.pull_direction = math::rot_z(v.pull_angle_jitter * u(rng)) * cfg.op.pull_direction;
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

ordered_json config_to_json(const ScenarioConfig& c) {
  ordered_json j;
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  j["timing"] = {{"physics_dt", c.timing.physics_dt},
                 {"control_dt", c.timing.control_dt},
                 {"duration", c.timing.duration},
                 {"telemetry_hz", c.timing.telemetry_hz}};
  j["uam"] = {{"mass", c.uam.mass},
              {"gravity", c.uam.gravity},
              {"initial_position", arr(c.uam.initial_position)},
              {"initial_yaw", c.uam.initial_yaw},
              {"arm_mount", arr(c.uam.arm.mount)},
              {"arm_reach", c.uam.arm.reach},
              {"joint_rate_limit", c.uam.joint_rate_limit},
              {"grip_close_angle", c.uam.grip_close_angle},
              {"tilt_limit", c.uam.tilt_limit}};
  j["gains"] = {{"kp", diag(c.uam_gains.kp)},
                {"kd", diag(c.uam_gains.kd)},
                {"kr", diag(c.uam_gains.kr)},
                {"mass_hat", c.uam_gains.mass_hat},
                {"g_hat", c.uam_gains.g_hat}};
  j["dob"] = {{"nu", c.dob.nu},
              {"nu_estimation", c.dob.nu_estimation},
              {"gain_zeta", arr(c.dob.gain_zeta)},
              {"gain_chi", arr(c.dob.gain_chi)}};
  j["kf"] = {{"q", c.kf.q}, {"r", c.kf.r}};
  const auto& h = c.haptic;
  ordered_json link_length = ordered_json::array(), link_mass = ordered_json::array();
  for (int i = 0; i < 4; ++i) {
    link_length.push_back(h.arm.link_length[i]);
    link_mass.push_back(h.arm.link_mass[i]);
  }
  j["haptic"] = {
      {"link_length", link_length},
      {"link_mass", link_mass},
      {"payload_mass", h.arm.payload_mass},
      {"armature", h.arm.armature},
      {"gravity", h.arm.gravity},
      {"gripper_inertia", h.gripper_inertia},
      {"initial_theta", arr(h.initial_theta)},
      {"grip_min", h.grip_min},
      {"grip_max", h.grip_max},
      {"observer_gain", arr(h.observer_gain)},
      {"servo",
       {{"arm_kp", h.servo.arm_kp},
        {"arm_kd", h.servo.arm_kd},
        {"grip_kp", h.servo.grip_kp},
        {"grip_kd", h.servo.grip_kd}}},
      {"admittance",
       {{"inertia", diag(h.gains.inertia)},
        {"damping", diag(h.gains.damping)},
        {"recenter", diag(h.gains.recenter)},
        {"recovery", diag(h.gains.recovery)},
        {"k_dg", h.gains.k_dg},
        {"k_fbg", h.gains.k_fbg},
        {"k_tau", h.gains.k_tau},
        {"force_reflection_scale", h.gains.force_reflection_scale}}}};
  j["teleop"] = {{"v_max", arr(c.teleop.v_max)},
                 {"handle_range", arr(c.teleop.handle_range)},
                 {"fdot_threshold", c.teleop.fdot_threshold},
                 {"recovery_duration", c.teleop.recovery_duration},
                 {"arming_guards", c.teleop.arming_guards},
                 {"arm_force", c.teleop.arm_force},
                 {"arm_debounce", c.teleop.arm_debounce}};
  j["plug"] = {{"anchor", arr(c.plug.anchor)},
               {"wedge_axis", arr(c.plug.wedge_axis)},
               {"stiffness", c.plug.stiffness},
               {"damping", c.plug.damping},
               {"break_force", c.plug.break_force},
               {"release_tau", c.plug.release_tau},
               {"capture_radius", c.plug.capture_radius}};
  const auto& o = c.op;
  ordered_json wps = ordered_json::array();
  for (const auto& w : o.approach_waypoints) wps.push_back(arr(w));
  j["operator"] = {{"enabled", o.enabled},
                   {"start_delay", o.start_delay},
                   {"reaction_time", o.reaction_time},
                   {"hand_tau", o.hand_tau},
                   {"pull_direction", arr(o.pull_direction)},
                   {"pull_peak", o.pull_peak},
                   {"pull_rate", o.pull_rate},
                   {"approach_gain", o.approach_gain},
                   {"approach_max_displacement", o.approach_max_displacement},
                   {"hand_stiffness", o.hand_stiffness},
                   {"hand_damping", o.hand_damping},
                   {"pull_line_stiffness", o.pull_line_stiffness},
                   {"approach_tolerance", o.approach_tolerance},
                   {"approach_speed_tolerance", o.approach_speed_tolerance},
                   {"approach_settle", o.approach_settle},
                   {"approach_waypoints", wps},
                   {"grip_torque", o.grip_torque},
                   {"grip_ramp", o.grip_ramp},
                   {"grasp_hold", o.grasp_hold},
                   {"tremor_amplitude", o.tremor_amplitude},
                   {"tremor_frequency", o.tremor_frequency}};
  j["variation"] = {{"anchor_jitter", c.variation.anchor_jitter},
                    {"pull_rate_jitter", c.variation.pull_rate_jitter},
                    {"pull_peak_jitter", c.variation.pull_peak_jitter},
                    {"pull_angle_jitter", c.variation.pull_angle_jitter}};
  j["limits"] = {{"max_position", c.limits.max_position}, {"max_arm_rate", c.limits.max_arm_rate}};
  return j;
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig c;
  Reader r(j, "config");
  r.get("mode", c.mode);
  r.get("seed", c.seed);
  r.object("timing", [&](Reader& s) {
    s.get("physics_dt", c.timing.physics_dt);
    s.get("control_dt", c.timing.control_dt);
    s.get("duration", c.timing.duration);
    s.get("telemetry_hz", c.timing.telemetry_hz);
  });
  r.object("uam", [&](Reader& s) {
    s.get("mass", c.uam.mass);
    s.get("gravity", c.uam.gravity);
    s.get("initial_position", c.uam.initial_position);
    s.get("initial_yaw", c.uam.initial_yaw);
    s.get("arm_mount", c.uam.arm.mount);
    s.get("arm_reach", c.uam.arm.reach);
    s.get("joint_rate_limit", c.uam.joint_rate_limit);
    s.get("grip_close_angle", c.uam.grip_close_angle);
    s.get("tilt_limit", c.uam.tilt_limit);
  });
  r.object("gains", [&](Reader& s) {
    s.get("kp", c.uam_gains.kp);
    s.get("kd", c.uam_gains.kd);
    s.get("kr", c.uam_gains.kr);
    s.get("mass_hat", c.uam_gains.mass_hat);
    s.get("g_hat", c.uam_gains.g_hat);
  });
  r.object("dob", [&](Reader& s) {
    s.get("nu", c.dob.nu);
    s.get("nu_estimation", c.dob.nu_estimation);
    s.get("gain_zeta", c.dob.gain_zeta);
    s.get("gain_chi", c.dob.gain_chi);
  });
  r.object("kf", [&](Reader& s) {
    s.get("q", c.kf.q);
    s.get("r", c.kf.r);
  });
  r.object("haptic", [&](Reader& s) {
    auto& h = c.haptic;
    s.get("link_length", h.arm.link_length);
    s.get("link_mass", h.arm.link_mass);
    s.get("payload_mass", h.arm.payload_mass);
    s.get("armature", h.arm.armature);
    s.get("gravity", h.arm.gravity);
    s.get("gripper_inertia", h.gripper_inertia);
    s.get("initial_theta", h.initial_theta);
    s.get("grip_min", h.grip_min);
    s.get("grip_max", h.grip_max);
    s.get("observer_gain", h.observer_gain);
    s.object("servo", [&](Reader& t) {
      t.get("arm_kp", h.servo.arm_kp);
      t.get("arm_kd", h.servo.arm_kd);
      t.get("grip_kp", h.servo.grip_kp);
      t.get("grip_kd", h.servo.grip_kd);
    });
    s.object("admittance", [&](Reader& t) {
      t.get("inertia", h.gains.inertia);
      t.get("damping", h.gains.damping);
      t.get("recenter", h.gains.recenter);
      t.get("recovery", h.gains.recovery);
      t.get("k_dg", h.gains.k_dg);
      t.get("k_fbg", h.gains.k_fbg);
      t.get("k_tau", h.gains.k_tau);
      t.get("force_reflection_scale", h.gains.force_reflection_scale);
    });
  });
  r.object("teleop", [&](Reader& s) {
    s.get("v_max", c.teleop.v_max);
    s.get("handle_range", c.teleop.handle_range);
    s.get("fdot_threshold", c.teleop.fdot_threshold);
    s.get("recovery_duration", c.teleop.recovery_duration);
    s.get("arming_guards", c.teleop.arming_guards);
    s.get("arm_force", c.teleop.arm_force);
    s.get("arm_debounce", c.teleop.arm_debounce);
  });
  r.object("plug", [&](Reader& s) {
    s.get("anchor", c.plug.anchor);
    s.get("wedge_axis", c.plug.wedge_axis);
    s.get("stiffness", c.plug.stiffness);
    s.get("damping", c.plug.damping);
    s.get("break_force", c.plug.break_force);
    s.get("release_tau", c.plug.release_tau);
    s.get("capture_radius", c.plug.capture_radius);
  });
  r.object("operator", [&](Reader& s) {
    auto& o = c.op;
    s.get("enabled", o.enabled);
    s.get("start_delay", o.start_delay);
    s.get("reaction_time", o.reaction_time);
    s.get("hand_tau", o.hand_tau);
    s.get("pull_direction", o.pull_direction);
    s.get("pull_peak", o.pull_peak);
    s.get("pull_rate", o.pull_rate);
    s.get("approach_gain", o.approach_gain);
    s.get("approach_max_displacement", o.approach_max_displacement);
    s.get("hand_stiffness", o.hand_stiffness);
    s.get("hand_damping", o.hand_damping);
    s.get("pull_line_stiffness", o.pull_line_stiffness);
    s.get("approach_tolerance", o.approach_tolerance);
    s.get("approach_speed_tolerance", o.approach_speed_tolerance);
    s.get("approach_settle", o.approach_settle);
    s.get("approach_waypoints", o.approach_waypoints);
    s.get("grip_torque", o.grip_torque);
    s.get("grip_ramp", o.grip_ramp);
    s.get("grasp_hold", o.grasp_hold);
    s.get("tremor_amplitude", o.tremor_amplitude);
    s.get("tremor_frequency", o.tremor_frequency);
  });
  r.object("variation", [&](Reader& s) {
    s.get("anchor_jitter", c.variation.anchor_jitter);
    s.get("pull_rate_jitter", c.variation.pull_rate_jitter);
    s.get("pull_peak_jitter", c.variation.pull_peak_jitter);
    s.get("pull_angle_jitter", c.variation.pull_angle_jitter);
  });
  r.object("limits", [&](Reader& s) {
    s.get("max_position", c.limits.max_position);
    s.get("max_arm_rate", c.limits.max_arm_rate);
  });
  r.finish();
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace plugpull::sim
