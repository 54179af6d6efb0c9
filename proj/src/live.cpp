#include "plugpull/live.hpp"

#include <cmath>

#include <json.hpp>

namespace plugpull::svc {

const char* to_string(CommandKind k) {
  switch (k) {
    case CommandKind::HandleWrench: return "handle_wrench";
    case CommandKind::GripTorque: return "grip_torque";
    case CommandKind::YawSetpoint: return "yaw_setpoint";
    case CommandKind::Reset: return "reset";
  }
  return "?";
}

std::string CommandError::reply() const { return nlohmann::json{{"error", message}}.dump(); }

namespace {

std::optional<CommandKind> kind_from_string(const std::string& s) {
  for (auto k : {CommandKind::HandleWrench, CommandKind::GripTorque, CommandKind::YawSetpoint,
                 CommandKind::Reset}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

std::size_t payload_size(CommandKind k) {
  switch (k) {
    case CommandKind::HandleWrench: return 3;
    case CommandKind::GripTorque:
    case CommandKind::YawSetpoint: return 1;
    case CommandKind::Reset: return 0;
  }
  return 0;
}

}  // namespace

std::variant<CommandFrame, CommandError> parse_command(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return CommandError{"malformed frame"};
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) return CommandError{"missing kind"};
  const auto kind = kind_from_string(kind_it->get<std::string>());
  if (!kind) return CommandError{"unknown kind"};

  CommandFrame cmd;
  cmd.kind = *kind;
  auto p = j.find("payload");
  if (p != j.end() && !p->is_null()) {
    // A bare number counts as a one-element payload.
    if (p->is_number()) {
      cmd.payload.push_back(p->get<double>());
    } else if (p->is_array()) {
      for (const auto& x : *p) {
        if (!x.is_number()) return CommandError{"payload must be numbers"};
        cmd.payload.push_back(x.get<double>());
      }
    } else {
      return CommandError{"payload must be numbers"};
    }
  }
  if (cmd.payload.size() != payload_size(cmd.kind)) {
    return CommandError{std::string(to_string(cmd.kind)) + " takes " +
                        std::to_string(payload_size(cmd.kind)) + " numbers"};
  }
  for (double x : cmd.payload) {
    if (!std::isfinite(x)) return CommandError{"payload not finite"};
  }
  return cmd;
}

std::string encode_command(const CommandFrame& cmd) {
  return nlohmann::json{{"kind", to_string(cmd.kind)}, {"payload", cmd.payload}}.dump();
}

void CommandQueue::push(CommandFrame cmd) {
  std::lock_guard lock(mutex_);
  pending_.push_back(std::move(cmd));
}

std::vector<CommandFrame> CommandQueue::drain() {
  std::lock_guard lock(mutex_);
  std::vector<CommandFrame> out(std::make_move_iterator(pending_.begin()),
                                std::make_move_iterator(pending_.end()));
  pending_.clear();
  return out;
}

std::size_t CommandQueue::size() const {
  std::lock_guard lock(mutex_);
  return pending_.size();
}

LiveSession::LiveSession(const sim::ScenarioConfig& cfg)
    : sim_(cfg, sim::OperatorSource::External), decimator_(cfg.timing.telemetry_hz) {}

void LiveSession::apply(const CommandFrame& cmd) {
  switch (cmd.kind) {
    case CommandKind::HandleWrench:
      input_.hand_force = Vec3(cmd.payload[0], cmd.payload[1], cmd.payload[2]);
      break;
    case CommandKind::GripTorque:
      input_.grip_torque = cmd.payload[0];
      break;
    case CommandKind::YawSetpoint:
      sim_.set_yaw_setpoint(cmd.payload[0]);
      break;
    case CommandKind::Reset:
      sim_.reset();
      decimator_.reset();
      input_ = {};
      break;
  }
  sim_.set_external_input(input_);
}

LiveSession::Tick LiveSession::tick() {
  for (const auto& cmd : queue_.drain()) apply(cmd);
  Tick out;
  out.row = sim_.step();
  if (decimator_.accept(out.row.t)) out.frame = frame_from_row(out.row);
  return out;
}

}  // namespace plugpull::svc
