#pragma once

#include <optional>

#include "plugpull/simlog.hpp"

namespace plugpull::sim {

inline constexpr double kReturnTolerance = 0.05;  // [m]
inline constexpr double kReturnHold = 0.5;        // [s]

struct Metrics {
  bool separated = false;
  double t_sep = 0.0;                    // first EXTRACTED row
  Vec3 p_e = Vec3::Zero();               // p_c at t_sep
  double overshoot = 0.0;                // max |p_c - p_e| over [t_sep, t_sep + window]
  std::optional<double> time_to_return;  // after t_sep; 0 when never left the tolerance
  double peak_fdot = 0.0;                // over the whole log
  std::optional<double> t_detect;        // first RECOVERY row
};

/// Metrics are marked absent (separated = false) when the plug never came out.
Metrics compute_metrics(const SimLog& log, double window = 5.0);

}  // namespace plugpull::sim
