#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "plugpull/plant.hpp"
#include "plugpull/spatial_math.hpp"
#include "plugpull/teleop.hpp"

namespace plugpull::sim {

/// One row per control period, sampled at the start of the period.
struct LogRow {
  double t = 0.0;
  Vec3 pc = Vec3::Zero();
  Vec3 pcd = Vec3::Zero();
  Vec3 vc = Vec3::Zero();
  Vec3 vcd = Vec3::Zero();
  Vec3 phi = Vec3::Zero();
  Vec4 theta_h = Vec4::Zero();
  Vec4 theta_hd = Vec4::Zero();
  Vec3 p_h = Vec3::Zero();       // handle tip displacement from home [m]
  double theta_g = 0.0;
  Vec3 fhat = Vec3::Zero();      // world [N]
  double fdot_norm = 0.0;        // [N/s]
  Vec3 ftrue = Vec3::Zero();     // world [N]
  teleop::Phase phase = teleop::Phase::Nominal;
  plant::AttachState attach = plant::AttachState::Free;
};

struct SimLog {
  std::vector<LogRow> rows;
};

/// Fixed column names, in file order.
const std::vector<std::string>& csv_columns();

/// %.6g with -0 normalized to 0.
std::string format_number(double x);

void write_csv(std::ostream& out, const SimLog& log);
void write_csv_file(const std::string& path, const SimLog& log);
/// Throws Error on malformed input.
SimLog read_csv(std::istream& in);
SimLog read_csv_file(const std::string& path);

}  // namespace plugpull::sim
