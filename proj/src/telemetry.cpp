#include "plugpull/telemetry.hpp"

#include <cmath>

#include <json.hpp>

#include "plugpull/errors.hpp"

namespace plugpull::svc {

TelemetryFrame frame_from_row(const sim::LogRow& row) {
  TelemetryFrame f;
  f.t = row.t;
  f.pc = row.pc;
  f.pcd = row.pcd;
  f.fhat = row.fhat;
  f.fdot_norm = row.fdot_norm;
  f.phase = teleop::to_string(row.phase);
  f.theta_h = row.theta_h;
  f.theta_g = row.theta_g;
  f.attach = plant::to_string(row.attach);
  return f;
}

namespace {

void put_key(std::string& out, const char* key) {
  if (out.size() > 1) out += ',';
  out += '"';
  out += key;
  out += "\":";
}

void put_number(std::string& out, const char* key, double x) {
  put_key(out, key);
  out += sim::format_number(x);
}

template <class V>
void put_array(std::string& out, const char* key, const V& v) {
  put_key(out, key);
  out += '[';
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += sim::format_number(v[i]);
  }
  out += ']';
}

void put_string(std::string& out, const char* key, const std::string& s) {
  put_key(out, key);
  out += nlohmann::json(s).dump();
}

double number_at(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw Error(std::string("telemetry: '") + key + "' must be a number");
  return it->get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> array_at(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array() || it->size() != N) {
    throw Error(std::string("telemetry: '") + key + "' must be an array of " + std::to_string(N));
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!(*it)[i].is_number()) throw Error(std::string("telemetry: '") + key + "' holds a non-number");
    v[i] = (*it)[i].get<double>();
  }
  return v;
}

std::string string_at(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw Error(std::string("telemetry: '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

std::string encode_telemetry(const TelemetryFrame& f) {
  std::string out = "{";
  put_number(out, "t", f.t);
  put_array(out, "pc", f.pc);
  put_array(out, "pcd", f.pcd);
  put_array(out, "fhat", f.fhat);
  put_number(out, "fdot_norm", f.fdot_norm);
  put_string(out, "phase", f.phase);
  put_array(out, "thetaH", f.theta_h);
  put_number(out, "thetag", f.theta_g);
  put_string(out, "attach", f.attach);
  out += '}';
  return out;
}

TelemetryFrame decode_telemetry(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("telemetry: not a JSON object");
  TelemetryFrame f;
  f.t = number_at(j, "t");
  f.pc = array_at<3>(j, "pc");
  f.pcd = array_at<3>(j, "pcd");
  f.fhat = array_at<3>(j, "fhat");
  f.fdot_norm = number_at(j, "fdot_norm");
  f.phase = string_at(j, "phase");
  f.theta_h = array_at<4>(j, "thetaH");
  f.theta_g = number_at(j, "thetag");
  f.attach = string_at(j, "attach");
  return f;
}

bool TelemetryDecimator::accept(double t) {
  // Small slack so rows at exact multiples are not lost to rounding.
  if (t * hz_ + 1e-6 < static_cast<double>(next_)) return false;
  next_ = static_cast<std::int64_t>(std::floor(t * hz_ + 1e-6)) + 1;
  return true;
}

}  // namespace plugpull::svc
