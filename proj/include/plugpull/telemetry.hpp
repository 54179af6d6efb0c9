#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "plugpull/simlog.hpp"

namespace plugpull::svc {

struct TelemetryFrame {
  double t = 0.0;
  Vec3 pc = Vec3::Zero();
  Vec3 pcd = Vec3::Zero();
  Vec3 fhat = Vec3::Zero();
  double fdot_norm = 0.0;
  std::string phase = "NOMINAL";
  Vec4 theta_h = Vec4::Zero();
  double theta_g = 0.0;
  std::string attach = "FREE";
};

TelemetryFrame frame_from_row(const sim::LogRow& row);

/// Flat JSON object, fixed key order, numbers as %.6g.
std::string encode_telemetry(const TelemetryFrame& frame);
/// Throws Error on missing keys or wrong shapes.
TelemetryFrame decode_telemetry(std::string_view text);

/// Passes the first row at or after each multiple of 1/hz.
class TelemetryDecimator {
 public:
  explicit TelemetryDecimator(double hz = 30.0) : hz_(hz) {}
  bool accept(double t);
  void reset() { next_ = 0; }
  double rate() const { return hz_; }

 private:
  double hz_;
  std::int64_t next_ = 0;
};

}  // namespace plugpull::svc
