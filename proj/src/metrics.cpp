#include "plugpull/metrics.hpp"

#include <algorithm>

namespace plugpull::sim {

Metrics compute_metrics(const SimLog& log, double window) {
  Metrics m;
  const auto& rows = log.rows;
  for (const auto& r : rows) m.peak_fdot = std::max(m.peak_fdot, r.fdot_norm);

  auto sep = std::find_if(rows.begin(), rows.end(),
                          [](const LogRow& r) { return r.attach == plant::AttachState::Extracted; });
  auto det = std::find_if(rows.begin(), rows.end(),
                          [](const LogRow& r) { return r.phase == teleop::Phase::Recovery; });
  if (det != rows.end()) m.t_detect = det->t;
  if (sep == rows.end()) return m;

  m.separated = true;
  m.t_sep = sep->t;
  m.p_e = sep->pc;
  const double t_end = m.t_sep + window + 1e-9;

  bool left = false;
  bool inside = false;
  double inside_since = 0.0;
  for (auto it = sep; it != rows.end(); ++it) {
    const double d = (it->pc - m.p_e).norm();
    if (it->t <= t_end) m.overshoot = std::max(m.overshoot, d);
    if (m.time_to_return) continue;
    if (d > kReturnTolerance) {
      left = true;
      inside = false;
    } else if (left) {
      if (!inside) {
        inside = true;
        inside_since = it->t;
      }
      if (it->t - inside_since >= kReturnHold - 1e-9) m.time_to_return = inside_since - m.t_sep;
    }
  }
  if (!left) m.time_to_return = 0.0;
  return m;
}

}  // namespace plugpull::sim
