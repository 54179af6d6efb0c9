#pragma once

#include <memory>
#include <string>

#include "plugpull/config.hpp"

namespace plugpull::svc {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  double realtime_factor = 1.0;
};

/// Live mode: one sim thread paced against the wall clock, one network
/// thread serving WebSocket clients on /ws.
class Server {
 public:
  Server(const sim::ScenarioConfig& cfg, const ServerOptions& opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts both threads. Throws Error when the bind fails.
  void start();
  void stop();
  /// Blocks until stop() or a signal handled by the caller.
  void wait();

  unsigned short port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace plugpull::svc
