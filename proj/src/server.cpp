#include "plugpull/server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <iostream>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "plugpull/errors.hpp"
#include "plugpull/live.hpp"

namespace plugpull::svc {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

constexpr std::size_t kMaxOutbox = 64;

class WsSession;

/// Lives on the network thread only.
class Hub {
 public:
  explicit Hub(CommandQueue& queue) : queue_(queue) {}

  void join(const std::shared_ptr<WsSession>& s) { sessions_.insert(s); }
  void leave(const std::shared_ptr<WsSession>& s) { sessions_.erase(s); }
  void broadcast(const std::shared_ptr<const std::string>& msg);
  void close_all();

  /// Reply text for rejected frames, empty when queued.
  std::string handle_text(const std::string& text) {
    auto parsed = parse_command(text);
    if (auto* err = std::get_if<CommandError>(&parsed)) return err->reply();
    queue_.push(std::get<CommandFrame>(std::move(parsed)));
    return {};
  }

 private:
  CommandQueue& queue_;
  std::set<std::shared_ptr<WsSession>> sessions_;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Hub& hub) : ws_(std::move(socket)), hub_(hub) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->hub_.join(self);
      self->read();
    });
  }

  void send(std::shared_ptr<const std::string> msg, bool droppable) {
    if (droppable && outbox_.size() >= kMaxOutbox) return;  // slow client
    outbox_.push_back(std::move(msg));
    if (outbox_.size() == 1) write();
  }

  void close() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->hub_.leave(self);
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      const std::string reply = self->hub_.handle_text(text);
      if (!reply.empty()) self->send(std::make_shared<const std::string>(reply), false);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->hub_.leave(self);
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->write();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> outbox_;
  Hub& hub_;
};

void Hub::broadcast(const std::shared_ptr<const std::string>& msg) {
  for (const auto& s : sessions_) s->send(msg, true);
}

void Hub::close_all() {
  for (const auto& s : sessions_) s->close();
  sessions_.clear();
}

/// Reads the upgrade request; anything but GET /ws gets a 404.
class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Hub& hub) : stream_(std::move(socket)), hub_(hub) {}

  void run() {
    stream_.expires_after(std::chrono::seconds(10));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->on_request();
                     });
  }

 private:
  void on_request() {
    if (websocket::is_upgrade(req_) && req_.target() == "/ws") {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), hub_)->run(std::move(req_));
      return;
    }
    res_.version(req_.version());
    res_.result(http::status::not_found);
    res_.set(http::field::content_type, "text/plain");
    res_.body() = "websocket endpoint is /ws\n";
    res_.keep_alive(false);
    res_.prepare_payload();
    http::async_write(stream_, res_, [self = shared_from_this()](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  http::response<http::string_body> res_;
  Hub& hub_;
};

}  // namespace

struct Server::Impl {
  Impl(const sim::ScenarioConfig& cfg, const ServerOptions& o)
      : opts(o), session(cfg), hub(session.commands()), acceptor(ioc) {}

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      std::make_shared<HttpSession>(std::move(socket), hub)->run();
      accept();
    });
  }

  void sim_loop() {
    using clock = std::chrono::steady_clock;
    const double factor = opts.realtime_factor;
    auto origin = clock::now();
    double t_origin = session.simulator().time();
    while (!stopping.load()) {
      LiveSession::Tick tick;
      try {
        tick = session.tick();
      } catch (const NumericalDivergence& e) {
        std::cerr << "plugpull: " << e.what() << "; resetting\n";
        session.commands().push(CommandFrame{CommandKind::Reset, {}});
        continue;
      }
      if (tick.frame) {
        auto msg = std::make_shared<const std::string>(encode_telemetry(*tick.frame));
        net::post(ioc, [this, msg] { hub.broadcast(msg); });
      }
      const double t = session.simulator().time();
      if (t < t_origin) {  // reset
        origin = clock::now();
        t_origin = t;
      }
      if (factor > 0) {
        const auto due = origin + std::chrono::duration_cast<clock::duration>(
                                      std::chrono::duration<double>((t - t_origin) / factor));
        std::this_thread::sleep_until(due);
      }
    }
  }

  ServerOptions opts;
  LiveSession session;
  Hub hub;
  net::io_context ioc{1};
  tcp::acceptor acceptor;
  std::thread net_thread;
  std::thread sim_thread;
  std::atomic<bool> stopping{false};
  std::mutex done_mutex;
  std::condition_variable done_cv;
  bool stopped = false;
  unsigned short bound_port = 0;
};

Server::Server(const sim::ScenarioConfig& cfg, const ServerOptions& opts)
    : impl_(std::make_unique<Impl>(cfg, opts)) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& m = *impl_;
  beast::error_code ec;
  const auto address = net::ip::make_address(m.opts.address, ec);
  if (ec) throw Error("bad address '" + m.opts.address + "'");
  const tcp::endpoint ep(address, m.opts.port);
  m.acceptor.open(ep.protocol(), ec);
  if (!ec) m.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) m.acceptor.bind(ep, ec);
  if (!ec) m.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error("cannot listen on " + m.opts.address + ":" + std::to_string(m.opts.port) + ": " +
                      ec.message());
  m.bound_port = m.acceptor.local_endpoint().port();
  m.accept();
  m.net_thread = std::thread([&m] {
    auto guard = net::make_work_guard(m.ioc);
    m.ioc.run();
  });
  m.sim_thread = std::thread([&m] { m.sim_loop(); });
}

void Server::stop() {
  auto& m = *impl_;
  if (m.stopping.exchange(true)) {
    wait();
    return;
  }
  if (m.sim_thread.joinable()) m.sim_thread.join();
  net::post(m.ioc, [&m] {
    beast::error_code ec;
    m.acceptor.close(ec);
    m.hub.close_all();
    m.ioc.stop();
  });
  if (m.net_thread.joinable()) m.net_thread.join();
  {
    std::lock_guard lock(m.done_mutex);
    m.stopped = true;
  }
  m.done_cv.notify_all();
}

void Server::wait() {
  auto& m = *impl_;
  std::unique_lock lock(m.done_mutex);
  m.done_cv.wait(lock, [&m] { return m.stopped; });
}

unsigned short Server::port() const { return impl_->bound_port; }

}  // namespace plugpull::svc
