#include <doctest.h>

#include <chrono>
#include <sstream>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "plugpull/errors.hpp"
#include "plugpull/live.hpp"
#include "plugpull/server.hpp"
#include "plugpull/telemetry.hpp"

using namespace plugpull;
using namespace plugpull::svc;

namespace {

std::string csv_of(const std::vector<sim::LogRow>& rows) {
  std::ostringstream out;
  sim::write_csv(out, sim::SimLog{rows});
  return out.str();
}

}  // namespace

TEST_CASE("hover frame encoding") {
  sim::ScenarioConfig c;
  c.op.enabled = false;
  sim::Simulator s(c);
  const std::string json = encode_telemetry(frame_from_row(s.step()));
  CHECK(json.find("\"phase\":\"NOMINAL\"") != std::string::npos);
  CHECK(json.find("\"fhat\":[0,0,0]") != std::string::npos);
  CHECK(json.rfind("{\"t\":0,\"pc\":[", 0) == 0);
}

TEST_CASE("telemetry encode/decode/encode is byte-identical") {
  sim::ScenarioConfig c;
  c.timing.duration = 20.0;
  const auto log = sim::run_scenario(c);
  for (std::size_t i = 0; i < log.rows.size(); i += 97) {
    const std::string a = encode_telemetry(frame_from_row(log.rows[i]));
    const std::string b = encode_telemetry(decode_telemetry(a));
    CHECK(a == b);
  }
  CHECK_THROWS_AS(decode_telemetry("{\"t\":1}"), Error);
  CHECK_THROWS_AS(decode_telemetry("not json"), Error);
}

TEST_CASE("30 Hz decimation") {
  TelemetryDecimator d(30.0);
  int frames = 0;
  for (int k = 0; k < 30000; ++k) frames += d.accept(k * 2e-3);
  CHECK(frames == 1800);
  d.reset();
  CHECK(d.accept(0.0));
  CHECK_FALSE(d.accept(0.002));
}

TEST_CASE("command parsing") {
  auto ok = parse_command(R"({"kind":"handle_wrench","payload":[1,0,0]})");
  REQUIRE(std::holds_alternative<CommandFrame>(ok));
  CHECK(std::get<CommandFrame>(ok).payload == std::vector<double>{1, 0, 0});

  auto scalar = parse_command(R"({"kind":"grip_torque","payload":0.3})");
  REQUIRE(std::holds_alternative<CommandFrame>(scalar));
  CHECK(std::get<CommandFrame>(scalar).payload == std::vector<double>{0.3});

  CHECK(std::holds_alternative<CommandFrame>(parse_command(R"({"kind":"reset"})")));

  auto unknown = parse_command(R"({"kind":"fly","payload":[]})");
  REQUIRE(std::holds_alternative<CommandError>(unknown));
  CHECK(std::get<CommandError>(unknown).reply() == R"({"error":"unknown kind"})");

  CHECK(std::holds_alternative<CommandError>(parse_command(R"({"kind":"handle_wrench","payload":[1,2]})")));
  CHECK(std::holds_alternative<CommandError>(parse_command(R"({"kind":"yaw_setpoint","payload":[1e999]})")));
  CHECK(std::holds_alternative<CommandError>(parse_command(R"({"kind":"yaw_setpoint","payload":["x"]})")));
  CHECK(std::holds_alternative<CommandError>(parse_command("[1,2]")));
  CHECK(std::holds_alternative<CommandError>(parse_command("{")));

  const CommandFrame c{CommandKind::HandleWrench, {1.5, -2, 0}};
  auto round = parse_command(encode_command(c));
  REQUIRE(std::holds_alternative<CommandFrame>(round));
  CHECK(std::get<CommandFrame>(round).payload == c.payload);
}

TEST_CASE("command queue drains in order") {
  CommandQueue q;
  q.push({CommandKind::GripTorque, {0.1}});
  q.push({CommandKind::Reset, {}});
  CHECK(q.size() == 2);
  const auto all = q.drain();
  REQUIRE(all.size() == 2);
  CHECK(all[0].kind == CommandKind::GripTorque);
  CHECK(all[1].kind == CommandKind::Reset);
  CHECK(q.size() == 0);
}

TEST_CASE("live session without a client equals the idle scripted run") {
  sim::ScenarioConfig live_cfg;
  live_cfg.timing.duration = 10.0;
  sim::ScenarioConfig idle = live_cfg;
  idle.op.enabled = false;
  LiveSession live(live_cfg);
  sim::Simulator scripted(idle);
  std::vector<sim::LogRow> a, b;
  while (!scripted.finished()) {
    a.push_back(live.tick().row);
    b.push_back(scripted.step());
  }
  CHECK(csv_of(a) == csv_of(b));
}

TEST_CASE("commands act at the next control boundary") {
  sim::ScenarioConfig c;
  LiveSession live(c);
  for (int k = 0; k < 100; ++k) live.tick();
  live.commands().push({CommandKind::HandleWrench, {1, 0, 0}});
  CHECK(live.simulator().state().held.hand_force.norm() == 0.0);
  const auto t = live.tick();
  CHECK(live.simulator().state().held.hand_force == Vec3(1, 0, 0));
  const double periods = t.row.t / c.timing.control_dt;
  CHECK(periods == doctest::Approx(std::round(periods)).epsilon(1e-12));

  live.commands().push({CommandKind::GripTorque, {0.2}});
  live.commands().push({CommandKind::YawSetpoint, {0.3}});
  live.tick();
  CHECK(live.simulator().state().held.grip_torque == 0.2);
  CHECK(live.simulator().state().yaw_setpoint == 0.3);

  // Handle pushed along +x moves the UAM along +x.
  const double x0 = live.simulator().state().uam.position.x();
  for (int k = 0; k < 500; ++k) live.tick();
  CHECK(live.simulator().state().uam.position.x() > x0 + 0.01);

  live.commands().push({CommandKind::Reset, {}});
  const auto r = live.tick();
  REQUIRE(r.frame);
  CHECK(r.frame->t == 0.0);
  CHECK(r.frame->pc == c.uam.initial_position);
  CHECK(live.simulator().state().held.hand_force.norm() == 0.0);
}

TEST_CASE("websocket server round trip") {
  namespace beast = boost::beast;
  namespace websocket = beast::websocket;
  namespace http = beast::http;
  using tcp = boost::asio::ip::tcp;

  sim::ScenarioConfig c;
  ServerOptions o;
  o.port = 0;
  o.realtime_factor = 2.0;
  Server server(c, o);
  server.start();
  REQUIRE(server.port() != 0);

  boost::asio::io_context ioc;
  tcp::resolver resolver(ioc);
  const auto endpoints = resolver.resolve("127.0.0.1", std::to_string(server.port()));

  {
    tcp::socket sock(ioc);
    boost::asio::connect(sock, endpoints);
    http::request<http::empty_body> req{http::verb::get, "/", 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(sock, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(sock, buf, res);
    CHECK(res.result() == http::status::not_found);
  }

  websocket::stream<tcp::socket> ws(ioc);
  boost::asio::connect(ws.next_layer(), endpoints);
  ws.handshake("127.0.0.1", "/ws");

  auto read_text = [&] {
    beast::flat_buffer buf;
    ws.read(buf);
    return beast::buffers_to_string(buf.data());
  };

  const auto first = decode_telemetry(read_text());
  const auto second = decode_telemetry(read_text());
  CHECK(second.t > first.t);

  ws.text(true);
  ws.write(boost::asio::buffer(std::string(R"({"kind":"bogus","payload":[]})")));
  bool got_error = false;
  for (int i = 0; i < 200 && !got_error; ++i) {
    const std::string msg = read_text();
    if (msg.find("\"error\"") != std::string::npos) {
      CHECK(msg == R"({"error":"unknown kind"})");
      got_error = true;
    }
  }
  CHECK(got_error);

  // Still open: reset restarts the clock.
  double last_t = 0;
  for (int i = 0; i < 10; ++i) last_t = decode_telemetry(read_text()).t;
  REQUIRE(last_t > 0.1);
  ws.write(boost::asio::buffer(std::string(R"({"kind":"reset"})")));
  bool restarted = false;
  for (int i = 0; i < 200 && !restarted; ++i) {
    const auto f = decode_telemetry(read_text());
    if (f.t < last_t) {
      CHECK(f.t < 0.1);
      restarted = true;
    }
  }
  CHECK(restarted);

  beast::error_code ec;
  ws.close(websocket::close_code::normal, ec);
  server.stop();
}
