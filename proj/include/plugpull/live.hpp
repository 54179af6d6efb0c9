#pragma once

#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "plugpull/simulator.hpp"
#include "plugpull/telemetry.hpp"

namespace plugpull::svc {

enum class CommandKind { HandleWrench, GripTorque, YawSetpoint, Reset };

const char* to_string(CommandKind k);

struct CommandFrame {
  CommandKind kind = CommandKind::Reset;
  std::vector<double> payload;  // [fx, fy, fz] N, [tau] N m, [yaw] rad, []
};

/// Reply text for a rejected frame, e.g. {"error":"unknown kind"}.
struct CommandError {
  std::string message;
  std::string reply() const;
};

/// {"kind": ..., "payload": [...]}; payload must be finite and sized for the kind.
std::variant<CommandFrame, CommandError> parse_command(std::string_view text);
std::string encode_command(const CommandFrame& cmd);

/// Many writers, one reader (the sim loop).
class CommandQueue {
 public:
  void push(CommandFrame cmd);
  std::vector<CommandFrame> drain();
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::deque<CommandFrame> pending_;
};

/// Simulator driven by queued commands instead of the scripted operator.
class LiveSession {
 public:
  explicit LiveSession(const sim::ScenarioConfig& cfg);

  CommandQueue& commands() { return queue_; }

  /// Applies everything queued, then one control period. The frame is set
  /// when the telemetry decimator passes the row.
  struct Tick {
    sim::LogRow row;
    std::optional<TelemetryFrame> frame;
  };
  Tick tick();

  const sim::Simulator& simulator() const { return sim_; }
  const sim::ExternalOperatorInput& input() const { return input_; }

 private:
  void apply(const CommandFrame& cmd);

  sim::Simulator sim_;
  CommandQueue queue_;
  TelemetryDecimator decimator_;
  sim::ExternalOperatorInput input_;
};

}  // namespace plugpull::svc
